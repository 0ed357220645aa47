use crate::resonance::{Family, GenerationTable, PlanarPoint, StructuralError};

/// Abstract generation structure on binary labels.
///
/// Each generation holds the 2^{N−1} strings of length N−1, stored as the low
/// bits of a `usize`; digit i (1-based) is bit i−1. The age-i family with
/// address w pairs the two strings that differ only in digit i, as parents in
/// generation i and as children in generation i+1.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CombinatorialModel {
    pub n_gen: usize,
    pub per_gen: usize,
    pub families: Vec<Family>,
}

impl CombinatorialModel {
    /// Flat index of `label` in generation `g` (1-based).
    pub fn index(&self, g: usize, label: usize) -> usize {
        (g - 1) * self.per_gen + label
    }

    pub fn label(&self, v: usize) -> (usize, usize) {
        (v / self.per_gen + 1, v % self.per_gen)
    }

    pub fn len(&self) -> usize {
        self.n_gen * self.per_gen
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn generation_vec(&self) -> Vec<usize> {
        (0..self.len()).map(|v| v / self.per_gen + 1).collect()
    }

    /// Families of a given age, in address order.
    pub fn families_of_age(&self, age: usize) -> impl Iterator<Item = &Family> {
        self.families.iter().filter(move |f| f.age == age)
    }

    pub fn table<P: PlanarPoint>(&self, points: Vec<P>) -> Result<GenerationTable<P>, StructuralError> {
        GenerationTable::new(self.n_gen, self.per_gen, points, self.generation_vec(), self.families.clone())
    }
}

pub fn build_combinatorial_model(n_gen: usize) -> Result<CombinatorialModel, StructuralError> {
    if !(2..=24).contains(&n_gen) {
        return Err(StructuralError::Shape(format!("generation count {n_gen} outside 2..=24")));
    }
    let per_gen = 1usize << (n_gen - 1);
    let mut m = CombinatorialModel { n_gen, per_gen, families: Vec::new() };
    for age in 1..n_gen {
        let bit = 1usize << (age - 1);
        for w in (0..per_gen).filter(|w| w & bit == 0) {
            let (a, b) = (w, w | bit);
            let f = Family::unchecked(age, [m.index(age, a), m.index(age, b)], [m.index(age + 1, a), m.index(age + 1, b)]);
            m.families.push(f);
        }
    }
    Ok(m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::resonance::LatticePoint;

    #[test]
    fn sizes() {
        let m = build_combinatorial_model(2).unwrap();
        assert_eq!((m.per_gen, m.families.len()), (2, 1));
        let m = build_combinatorial_model(5).unwrap();
        assert_eq!((m.per_gen, m.families.len()), (16, 32));
        assert!(build_combinatorial_model(1).is_err());
    }

    #[test]
    fn spouse_differs_from_sibling() {
        for n in 2..=7 {
            let m = build_combinatorial_model(n).unwrap();
            // Identities are irrelevant here; only the membership conditions are exercised.
            let t = GenerationTable::new(n, m.per_gen, vec![LatticePoint::of(0, 0); m.len()], m.generation_vec(), m.families.clone()).unwrap();
            t.structural_check().unwrap();
            for v in 0..m.len() {
                let (g, _) = m.label(v);
                if g > 1 && g < n {
                    assert_ne!(t.spouse(v), t.sibling(v));
                }
            }
        }
    }
}
