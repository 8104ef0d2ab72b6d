/// Row-major bit matrix, one bit per entry.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BitGrid {
    rows: usize,
    cols: usize,
    words_per_row: usize,
    words: Vec<u64>,
}

impl BitGrid {
    pub fn new(rows: usize, cols: usize) -> Self {
        let words_per_row = cols.div_ceil(64);
        Self { rows, cols, words_per_row, words: vec![0; rows * words_per_row] }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> bool {
        debug_assert!(row < self.rows && col < self.cols);
        let w = self.words[row * self.words_per_row + col / 64];
        (w >> (col % 64)) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, row: usize, col: usize) {
        debug_assert!(row < self.rows && col < self.cols);
        self.words[row * self.words_per_row + col / 64] |= 1 << (col % 64);
    }

    pub fn count_ones(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn row_is_empty(&self, row: usize) -> bool {
        self.row_words(row).iter().all(|&w| w == 0)
    }

    fn row_words(&self, row: usize) -> &[u64] {
        &self.words[row * self.words_per_row..(row + 1) * self.words_per_row]
    }

    /// Column indices of the set bits in `row`, ascending.
    pub fn row_ones(&self, row: usize) -> Vec<usize> {
        let mut out = Vec::new();
        for (wi, &word) in self.row_words(row).iter().enumerate() {
            let mut w = word;
            while w != 0 {
                let b = w.trailing_zeros() as usize;
                out.push(wi * 64 + b);
                w &= w - 1;
            }
        }
        out
    }

    /// Maximal runs `[lo, hi]` of consecutive set bits in `row`.
    pub fn row_runs(&self, row: usize) -> Vec<(usize, usize)> {
        let words = self.row_words(row);
        let mut runs = Vec::new();
        let mut start: Option<usize> = None;
        let mut col = 0;
        while col < self.cols {
            let (wi, bit) = (col / 64, col % 64);
            let word = words[wi] >> bit;
            let avail = 64 - bit;
            // Length of the stretch of equal bits starting at `col`.
            let len = if start.is_some() { (!word).trailing_zeros() } else { word.trailing_zeros() } as usize;
            let len = len.min(avail);
            if len == avail {
                col += avail;
                continue;
            }
            col += len;
            match start.take() {
                Some(s) => runs.push((s, col - 1)),
                None => start = Some(col),
            }
        }
        if let Some(s) = start {
            runs.push((s, self.cols - 1));
        }
        runs
    }

    /// Overwrites the 64 columns starting at `64 * word` in `row`.
    pub fn set_word(&mut self, row: usize, word: usize, bits: u64) {
        self.words[row * self.words_per_row + word] = bits;
    }

    pub fn words_per_row(&self) -> usize {
        self.words_per_row
    }

    /// True iff every set bit of `self` is also set in `other`.
    pub fn is_subset_of(&self, other: &BitGrid) -> bool {
        self.rows == other.rows
            && self.cols == other.cols
            && self.words.iter().zip(&other.words).all(|(a, b)| a & !b == 0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn runs_and_ones() {
        let mut g = BitGrid::new(2, 130);
        for c in [0, 1, 2, 5, 63, 64, 65, 129] {
            g.set(1, c);
        }
        assert_eq!(g.row_runs(1), vec![(0, 2), (5, 5), (63, 65), (129, 129)]);
        assert!(g.row_is_empty(0));
        assert_eq!(g.count_ones(), 8);
        assert!(g.get(1, 64) && !g.get(1, 66));
        let mut full = BitGrid::new(1, 200);
        (0..200).for_each(|c| full.set(0, c));
        assert_eq!(full.row_runs(0), vec![(0, 199)]);
        let mut tail = BitGrid::new(1, 64);
        tail.set(0, 63);
        assert_eq!(tail.row_runs(0), vec![(63, 63)]);
    }

    #[test]
    fn subset_relation() {
        let mut a = BitGrid::new(3, 3);
        let mut b = BitGrid::new(3, 3);
        a.set(1, 1);
        b.set(1, 1);
        b.set(2, 0);
        assert!(a.is_subset_of(&b));
        assert!(!b.is_subset_of(&a));
    }
}
