use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Resolves the free choices made while reading an equilibrium back out of
/// the tables. `candidates` is non-empty and ascending.
pub trait Chooser {
    fn choose(&mut self, candidates: &[usize]) -> usize;
}

/// Built-in choice rules.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Policy {
    /// Always the smallest candidate.
    #[default]
    First,
    /// Uniform over candidates, seeded.
    Random(u64),
}

impl Policy {
    pub fn chooser(self) -> Box<dyn Chooser> {
        match self {
            Policy::First => Box::new(FirstChooser),
            Policy::Random(seed) => Box::new(RandomChooser(ChaCha8Rng::seed_from_u64(seed))),
        }
    }
}

pub struct FirstChooser;

impl Chooser for FirstChooser {
    fn choose(&mut self, candidates: &[usize]) -> usize {
        candidates[0]
    }
}

pub struct RandomChooser(ChaCha8Rng);

impl RandomChooser {
    pub fn new(seed: u64) -> Self {
        Self(ChaCha8Rng::seed_from_u64(seed))
    }
}

impl Chooser for RandomChooser {
    fn choose(&mut self, candidates: &[usize]) -> usize {
        candidates[self.0.gen_range(0..candidates.len())]
    }
}

impl<F: FnMut(&[usize]) -> usize> Chooser for F {
    fn choose(&mut self, candidates: &[usize]) -> usize {
        self(candidates)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn random_is_reproducible_and_in_range() {
        let c = [3, 5, 8, 13];
        let mut a = Policy::Random(7).chooser();
        let mut b = Policy::Random(7).chooser();
        for _ in 0..50 {
            let x = a.choose(&c);
            assert!(c.contains(&x));
            assert_eq!(x, b.choose(&c));
        }
        assert_eq!(Policy::First.chooser().choose(&c), 3);
    }

    #[test]
    fn closures_are_choosers() {
        let mut last = |c: &[usize]| *c.last().unwrap();
        assert_eq!(Chooser::choose(&mut last, &[1, 2, 9]), 9);
    }
}
