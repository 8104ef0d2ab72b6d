//! Occupancy pictures of a vertex's table.
//!
//! Rows are the child's value from 1 (top) down to 0, columns the vertex's
//! own value from 0 to 1, both sampled at `j/m`. The root has no child and
//! renders as a single row.

use std::fmt::Write;

/// What is known about one cell.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mark {
    Empty,
    /// Set in the rendered table; in an overlay, set in both.
    Filled,
    /// Overlay only: set in the approximate table alone.
    Approx,
    /// Overlay only: set in the exact table but not the approximate one.
    Missing,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Raster {
    pub title: String,
    pub m: usize,
    /// `rows[r][c]`, first row at the top.
    pub rows: Vec<Vec<Mark>>,
}

impl Raster {
    /// Samples `mark(child_index, own_index)`; `child_index` is `None` for
    /// the root.
    pub fn sample(title: String, m: usize, has_child: bool, mut mark: impl FnMut(Option<usize>, usize) -> Mark) -> Self {
        let rows = if has_child {
            (0..=m).rev().map(|w| (0..=m).map(|v| mark(Some(w), v)).collect()).collect()
        } else {
            vec![(0..=m).map(|v| mark(None, v)).collect()]
        };
        Self { title, m, rows }
    }

    pub fn count(&self, which: Mark) -> usize {
        self.rows.iter().flatten().filter(|&&x| x == which).count()
    }

    fn header(&self, prefix: &str) -> String {
        let axes = if self.rows.len() == 1 {
            "single row: own value 0 -> 1 (root)".to_string()
        } else {
            "rows: child value 1 -> 0, columns: own value 0 -> 1".to_string()
        };
        format!("{prefix} {}\n{prefix} resolution m = {} ({} x {} cells)\n{prefix} {axes}\n", self.title, self.m, self.rows[0].len(), self.rows.len())
    }

    /// One character per cell: `#` filled, `+` approximate only, `!` exact
    /// but not approximate, `.` empty.
    pub fn to_text(&self) -> String {
        let mut out = self.header("#");
        for row in &self.rows {
            out.extend(row.iter().map(|m| match m {
                Mark::Empty => '.',
                Mark::Approx => '+',
                Mark::Filled => '#',
                Mark::Missing => '!',
            }));
            out.push('\n');
        }
        out
    }

    /// ASCII PGM: filled cells black, approximate-only cells mid gray,
    /// empty cells white.
    pub fn to_pgm(&self) -> String {
        let mut out = String::from("P2\n");
        out.push_str(&self.header("#"));
        writeln!(out, "{} {}\n255", self.rows[0].len(), self.rows.len()).expect("string write");
        for row in &self.rows {
            let line: Vec<&str> = row
                .iter()
                .map(|m| match m {
                    Mark::Empty => "255",
                    Mark::Approx => "128",
                    Mark::Filled => "0",
                    Mark::Missing => "64",
                })
                .collect();
            out.push_str(&line.join(" "));
            out.push('\n');
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn layout_and_formats() {
        let r = Raster::sample("t".into(), 2, true, |w, v| if w == Some(2) && v == 0 { Mark::Filled } else { Mark::Empty });
        assert_eq!(r.rows[0][0], Mark::Filled);
        assert_eq!(r.count(Mark::Filled), 1);
        let text = r.to_text();
        assert!(text.ends_with("#..\n...\n...\n"), "{text}");
        let pgm = r.to_pgm();
        assert!(pgm.starts_with("P2\n#"));
        assert!(pgm.contains("\n3 3\n255\n0 255 255\n"));
        let root = Raster::sample("root".into(), 3, false, |_, v| if v > 1 { Mark::Approx } else { Mark::Empty });
        assert!(root.to_text().ends_with("..++\n"));
    }
}
