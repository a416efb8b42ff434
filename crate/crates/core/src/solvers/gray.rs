//! Loopless reflected mixed-radix Gray code (Knuth, TAOCP 7.2.1.1, Algorithm H).

/// Steps through all `radix^len` digit vectors, each step moving one digit by +-1.
pub(crate) struct ReflectedGray {
    digits: Vec<u8>,
    focus: Vec<usize>,
    dir: Vec<i8>,
    radix: u8,
}

impl ReflectedGray {
    /// Starts at the all-zero digit vector.
    pub(crate) fn new(len: usize, radix: u8) -> Self {
        assert!(radix >= 2);
        ReflectedGray {
            digits: vec![0; len],
            focus: (0..=len).collect(),
            dir: vec![1; len],
            radix,
        }
    }

    pub(crate) fn digits(&self) -> &[u8] {
        &self.digits
    }

    /// Advance; returns `(position, old digit, new digit)` or `None` when exhausted.
    pub(crate) fn step(&mut self) -> Option<(usize, u8, u8)> {
        let len = self.digits.len();
        let j = self.focus[0];
        self.focus[0] = 0;
        if j == len {
            return None;
        }
        let old = self.digits[j];
        let new = (old as i8 + self.dir[j]) as u8;
        self.digits[j] = new;
        if new == 0 || new == self.radix - 1 {
            self.dir[j] = -self.dir[j];
            self.focus[j] = self.focus[j + 1];
            self.focus[j + 1] = j + 1;
        }
        Some((j, old, new))
    }
}
