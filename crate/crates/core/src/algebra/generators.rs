use std::fmt;

use crate::error::{Error, Result};

/// Canonical Grassmann monomial: a strictly increasing product of generators,
/// stored as a bitmask over generator indices.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Monomial(pub u64);

impl Monomial {
    pub const ONE: Monomial = Monomial(0);

    pub fn generator(index: usize) -> Self {
        Monomial(1 << index)
    }

    pub fn from_indices(indices: &[usize]) -> Option<(Self, bool)> {
        let mut acc = Monomial::ONE;
        let mut negative = false;
        for &g in indices {
            let (m, neg) = acc.mul(Monomial::generator(g))?;
            acc = m;
            negative ^= neg;
        }
        Some((acc, negative))
    }

    pub fn degree(self) -> u32 {
        self.0.count_ones()
    }

    pub fn is_odd(self) -> bool {
        self.degree() % 2 == 1
    }

    pub fn contains(self, index: usize) -> bool {
        self.0 & (1 << index) != 0
    }

    /// Ascending generator indices.
    pub fn indices(self) -> impl Iterator<Item = usize> {
        let mut bits = self.0;
        std::iter::from_fn(move || {
            if bits == 0 {
                return None;
            }
            let i = bits.trailing_zeros() as usize;
            bits &= bits - 1;
            Some(i)
        })
    }

    /// Product `self * rhs` in canonical form; `None` when a generator repeats.
    /// The flag is `true` when reordering produced a minus sign.
    pub fn mul(self, rhs: Monomial) -> Option<(Monomial, bool)> {
        if self.0 & rhs.0 != 0 {
            return None;
        }
        Some((Monomial(self.0 | rhs.0), reorder_parity(self.0, rhs.0)))
    }
}

/// Parity of the transpositions needed to merge `a` (left) and `b` (right)
/// into ascending order: counts pairs (i in a, j in b) with i > j.
#[inline]
pub(crate) fn reorder_parity(a: u64, mut b: u64) -> bool {
    let mut count = 0u32;
    while b != 0 {
        let j = b.trailing_zeros();
        b &= b - 1;
        count += (a >> j >> 1).count_ones();
    }
    count % 2 == 1
}

/// Odd generators of the Grassmann algebra together with the dagger pairing
/// and the two superspace coordinates `theta+`, `theta-`.
#[derive(Clone, PartialEq, Eq)]
pub struct GeneratorTable {
    names: Vec<String>,
    partner: Vec<usize>,
    theta_plus: usize,
    theta_minus: usize,
}

impl fmt::Debug for GeneratorTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("GeneratorTable").field("names", &self.names).finish()
    }
}

pub const THETA_PLUS: &str = "theta+";
pub const THETA_MINUS: &str = "theta-";

impl GeneratorTable {
    pub fn new(names: Vec<String>, partner: Vec<usize>, theta_plus: usize, theta_minus: usize) -> Result<Self> {
        let n = names.len();
        if n > 64 {
            return Err(Error::InvalidTable(format!("{n} generators exceed the 64-bit monomial budget")));
        }
        if partner.len() != n {
            return Err(Error::InvalidTable("partner map has wrong length".into()));
        }
        for (i, name) in names.iter().enumerate() {
            if names[..i].contains(name) {
                return Err(Error::InvalidTable(format!("duplicate generator `{name}`")));
            }
        }
        for (i, &p) in partner.iter().enumerate() {
            if p >= n || partner[p] != i {
                return Err(Error::InvalidTable(format!("dagger pairing of `{}` is not an involution", names[i])));
            }
            if p == i {
                return Err(Error::InvalidTable(format!("`{}` has no distinct dagger partner", names[i])));
            }
        }
        if theta_plus >= n || theta_minus >= n || theta_plus == theta_minus {
            return Err(Error::InvalidTable("theta+ and theta- must be distinct generators".into()));
        }
        if partner[theta_plus] != theta_minus {
            return Err(Error::InvalidTable("theta+ must be the dagger of theta-".into()));
        }
        Ok(Self { names, partner, theta_plus, theta_minus })
    }

    /// Table from `(name, dagger-name)` pairs. `theta+`/`theta-` must be among them.
    pub fn from_pairs(pairs: &[(&str, &str)]) -> Result<Self> {
        let mut names = Vec::new();
        for (a, b) in pairs {
            names.push(a.to_string());
            names.push(b.to_string());
        }
        let index = |s: &str| names.iter().position(|n| n == s);
        let mut partner = vec![usize::MAX; names.len()];
        for (a, b) in pairs {
            let (ia, ib) = (index(a).unwrap(), index(b).unwrap());
            partner[ia] = ib;
            partner[ib] = ia;
        }
        let tp = index(THETA_PLUS).ok_or_else(|| Error::InvalidTable("missing theta+".into()))?;
        let tm = index(THETA_MINUS).ok_or_else(|| Error::InvalidTable("missing theta-".into()))?;
        Self::new(names, partner, tp, tm)
    }

    /// Plain superspace: only `theta+`, `theta-`.
    pub fn superspace() -> Self {
        Self::from_pairs(&[(THETA_PLUS, THETA_MINUS)]).unwrap()
    }

    /// Superspace plus `pairs` auxiliary generator pairs named `eta+`/`eta-`,
    /// `eta2+`/`eta2-`, ...
    pub fn with_eta_pairs(pairs: usize) -> Self {
        let names: Vec<(String, String)> = (0..pairs)
            .map(|k| {
                let tag = if k == 0 { String::new() } else { (k + 1).to_string() };
                (format!("eta{tag}+"), format!("eta{tag}-"))
            })
            .collect();
        let mut all: Vec<(&str, &str)> = vec![(THETA_PLUS, THETA_MINUS)];
        all.extend(names.iter().map(|(a, b)| (a.as_str(), b.as_str())));
        Self::from_pairs(&all).unwrap()
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn name(&self, index: usize) -> &str {
        &self.names[index]
    }

    pub fn partner(&self, index: usize) -> usize {
        self.partner[index]
    }

    pub fn theta_plus(&self) -> usize {
        self.theta_plus
    }

    pub fn theta_minus(&self) -> usize {
        self.theta_minus
    }

    pub fn theta_mask(&self) -> u64 {
        (1 << self.theta_plus) | (1 << self.theta_minus)
    }

    pub fn index_of(&self, name: &str) -> Result<usize> {
        self.names
            .iter()
            .position(|n| n == name)
            .ok_or_else(|| Error::UnknownGenerator(name.to_string()))
    }

    /// Generators other than the two thetas, as `(g, dagger g)` pairs with `g < dagger g`.
    pub fn auxiliary_pairs(&self) -> Vec<(usize, usize)> {
        (0..self.len())
            .filter(|&i| i != self.theta_plus && i != self.theta_minus && i < self.partner[i])
            .map(|i| (i, self.partner[i]))
            .collect()
    }

    /// Dagger of a monomial: factors reversed, each replaced by its partner,
    /// then re-canonicalised. Returns the image and its sign flag.
    pub fn dagger_monomial(&self, m: Monomial) -> (Monomial, bool) {
        let mut seq: Vec<usize> = m.indices().map(|i| self.partner[i]).collect();
        seq.reverse();
        let mut inversions = 0usize;
        for a in 0..seq.len() {
            for b in a + 1..seq.len() {
                if seq[a] > seq[b] {
                    inversions += 1;
                }
            }
        }
        let mask = seq.iter().fold(0u64, |acc, &i| acc | (1 << i));
        (Monomial(mask), inversions % 2 == 1)
    }

    pub fn render_monomial(&self, m: Monomial) -> String {
        if m == Monomial::ONE {
            return "1".into();
        }
        m.indices().map(|i| self.names[i].as_str()).collect::<Vec<_>>().join("*")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reorder_sign_counts_transpositions() {
        // g1 * g0 = -g0 g1
        assert_eq!(Monomial(0b10).mul(Monomial(0b01)), Some((Monomial(0b11), true)));
        assert_eq!(Monomial(0b01).mul(Monomial(0b10)), Some((Monomial(0b11), false)));
        assert_eq!(Monomial(0b01).mul(Monomial(0b01)), None);
        // g2 * (g0 g1): two transpositions
        assert_eq!(Monomial(0b100).mul(Monomial(0b011)), Some((Monomial(0b111), false)));
        // (g0 g2) * g1: one transposition
        assert_eq!(Monomial(0b101).mul(Monomial(0b010)), Some((Monomial(0b111), true)));
    }

    #[test]
    fn bitmask_encoding_round_trips() {
        for mask in 0u64..(1 << 6) {
            let m = Monomial(mask);
            let idx: Vec<usize> = m.indices().collect();
            assert_eq!(Monomial::from_indices(&idx), Some((m, false)));
        }
    }

    #[test]
    fn table_validation() {
        let t = GeneratorTable::with_eta_pairs(1);
        assert_eq!(t.len(), 4);
        assert_eq!(t.partner(t.theta_plus()), t.theta_minus());
        assert_eq!(t.auxiliary_pairs(), vec![(2, 3)]);
        let bad = GeneratorTable::new(vec!["theta+".into(), "theta-".into()], vec![0, 1], 0, 1);
        assert!(bad.is_err());
        let bad = GeneratorTable::new(vec!["theta+".into(), "theta-".into()], vec![1, 0], 0, 0);
        assert!(bad.is_err());
        assert!(GeneratorTable::from_pairs(&[("a", "b")]).is_err());
    }

    #[test]
    fn dagger_reverses_order() {
        let t = GeneratorTable::superspace();
        // (theta+ theta-)^dagger = theta+^dagger... reversed = theta+ theta-
        let (m, neg) = t.dagger_monomial(Monomial(0b11));
        assert_eq!((m, neg), (Monomial(0b11), false));
        let (m, neg) = t.dagger_monomial(Monomial(0b01));
        assert_eq!((m, neg), (Monomial(0b10), false));
    }
}
