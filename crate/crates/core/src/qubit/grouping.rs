//! Qubitwise-commuting measurement groups and importance-sampled group
//! selection.

use std::collections::{BTreeMap, HashMap};

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::Rng;

use super::pauli::{PauliString, PauliTerm};
use super::{QubitError, QubitOperator};

/// A set of mutually qubitwise-commuting terms, measured with one shared
/// basis rotation.
#[derive(Debug, Clone, PartialEq)]
pub struct CommutingGroup {
    pub members: Vec<PauliTerm>,
    /// Sum of |coefficient| over members.
    pub weight: f64,
    /// True when every member is built from `I` and `Z` only.
    pub is_diagonal: bool,
    /// Union of the members' letters; fixes the measurement basis.
    pub basis: PauliString,
}

impl CommutingGroup {
    fn empty(is_diagonal: bool) -> Self {
        Self { members: Vec::new(), weight: 0.0, is_diagonal, basis: PauliString::IDENTITY }
    }

    pub fn accepts(&self, s: &PauliString) -> bool {
        self.basis.qubitwise_commutes_with(s)
    }

    fn push(&mut self, t: PauliTerm) {
        self.weight += t.coeff.norm();
        self.basis = PauliString::new(self.basis.x | t.string.x, self.basis.z | t.string.z);
        self.members.push(t);
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn to_operator(&self, n_qubits: usize) -> QubitOperator {
        QubitOperator::from_terms(n_qubits, self.members.iter().copied())
    }
}

/// How off-diagonal terms are partitioned.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum GroupingStrategy {
    /// Visit terms by decreasing |coefficient| and put each into the first
    /// group that accepts it.
    #[default]
    FirstFitDecreasing,
    /// One group per distinct arrangement of `X`/`Y` letters; strings that
    /// differ only in where they carry `Z` share a group.
    XyPattern,
}

/// Splits `h` into the diagonal group and the off-diagonal terms sorted by
/// decreasing |coefficient| (stable, so canonical order breaks ties).
fn split_diagonal(h: &QubitOperator) -> (CommutingGroup, Vec<PauliTerm>) {
    let mut diag = CommutingGroup::empty(true);
    let mut rest: Vec<PauliTerm> = Vec::new();
    for t in h.terms() {
        if t.string.is_diagonal() {
            diag.push(t);
        } else {
            rest.push(t);
        }
    }
    rest.sort_by(|a, b| b.coeff.norm().total_cmp(&a.coeff.norm()));
    (diag, rest)
}

/// Partitions `h` into qubitwise-commuting groups by first-fit decreasing.
///
/// The diagonal group (identity and all-`Z` strings) comes first when it is
/// non-empty. The remaining terms are visited by decreasing |coefficient|,
/// ties broken by the operator's canonical string order, and each goes into
/// the first group that accepts it.
pub fn group_qubitwise(h: &QubitOperator) -> Vec<CommutingGroup> {
    group_with(h, GroupingStrategy::FirstFitDecreasing)
}

pub fn group_with(h: &QubitOperator, strategy: GroupingStrategy) -> Vec<CommutingGroup> {
    let (diag, rest) = split_diagonal(h);
    let mut groups: Vec<CommutingGroup> = Vec::new();
    if !diag.is_empty() {
        groups.push(diag);
    }
    let first_off = groups.len();
    match strategy {
        GroupingStrategy::FirstFitDecreasing => {
            for t in rest {
                match groups[first_off..].iter_mut().find(|g| g.accepts(&t.string)) {
                    Some(g) => g.push(t),
                    None => {
                        let mut g = CommutingGroup::empty(false);
                        g.push(t);
                        groups.push(g);
                    }
                }
            }
        }
        GroupingStrategy::XyPattern => {
            let mut slot: HashMap<(u64, u64), usize> = HashMap::new();
            for t in rest {
                let key = (t.string.x, t.string.x & t.string.z);
                let k = *slot.entry(key).or_insert_with(|| {
                    groups.push(CommutingGroup::empty(false));
                    groups.len() - 1
                });
                groups[k].push(t);
            }
        }
    }
    groups
}

/// Group selection distribution.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum GroupSampling {
    /// The diagonal group is always measured; the others are drawn with
    /// probability `W_k / sum_{j != 0} W_j`.
    #[default]
    DiagonalAlways,
    /// All groups, the diagonal one included, are drawn with probability
    /// `W_k / sum_j W_j`.
    Plain,
}

/// One selected group and its unbiasing weight.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GroupDraw {
    pub index: usize,
    pub weight: f64,
}

/// Draws `n_draws` groups with replacement.
///
/// A group drawn `m` times is returned once with weight `m / (n_draws p_k)`,
/// so `sum_k weight_k G_k` is an unbiased estimate of the full operator. In
/// [`GroupSampling::DiagonalAlways`] mode the diagonal group is returned
/// first with weight 1 and does not count towards `n_draws`.
pub fn sample_groups<R: Rng + ?Sized>(
    groups: &[CommutingGroup],
    n_draws: usize,
    mode: GroupSampling,
    rng: &mut R,
) -> Result<Vec<GroupDraw>, QubitError> {
    if groups.is_empty() {
        return Err(QubitError::EmptyGroups);
    }
    if n_draws == 0 {
        return Err(QubitError::ZeroDraws);
    }
    let mut out = Vec::new();
    let candidates: Vec<usize> = match mode {
        GroupSampling::Plain => (0..groups.len()).collect(),
        GroupSampling::DiagonalAlways => {
            let mut c = Vec::with_capacity(groups.len());
            for (k, g) in groups.iter().enumerate() {
                if g.is_diagonal {
                    out.push(GroupDraw { index: k, weight: 1.0 });
                } else {
                    c.push(k);
                }
            }
            c
        }
    };
    if candidates.is_empty() {
        return Ok(out);
    }
    let weights: Vec<f64> = candidates.iter().map(|&k| groups[k].weight).collect();
    let total: f64 = weights.iter().sum();
    let dist = match WeightedIndex::new(&weights) {
        Ok(d) => d,
        // all candidate weights zero: they contribute nothing
        Err(_) => return Ok(out),
    };
    let mut counts: BTreeMap<usize, usize> = BTreeMap::new();
    for _ in 0..n_draws {
        *counts.entry(dist.sample(rng)).or_default() += 1;
    }
    for (c, m) in counts {
        let p = weights[c] / total;
        out.push(GroupDraw { index: candidates[c], weight: m as f64 / (n_draws as f64 * p) });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qubit::pauli::Pauli;
    use num_complex::Complex64;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn term(letters: &[(usize, Pauli)], c: f64) -> PauliTerm {
        PauliTerm::real(PauliString::from_letters(letters), c)
    }

    #[test]
    fn diagonal_terms_share_one_group() {
        use Pauli::Z;
        let h = QubitOperator::from_terms(
            2,
            [term(&[(0, Z)], 0.3), term(&[(1, Z)], 0.2), term(&[(0, Z), (1, Z)], 0.1), PauliTerm::identity(1.0)],
        );
        let g = group_qubitwise(&h);
        assert_eq!(g.len(), 1);
        assert!(g[0].is_diagonal);
        assert_eq!(g[0].len(), 4);
    }

    #[test]
    fn xx_and_yy_split() {
        use Pauli::{X, Y};
        let h = QubitOperator::from_terms(2, [term(&[(0, X), (1, X)], 0.5), term(&[(0, Y), (1, Y)], 0.5)]);
        let g = group_qubitwise(&h);
        assert_eq!(g.len(), 2);
        assert!(g.iter().all(|g| !g.is_diagonal));
    }

    #[test]
    fn larger_coefficient_seeds_first_group() {
        use Pauli::{X, Z};
        let h = QubitOperator::from_terms(
            2,
            [term(&[(0, X)], 0.1), term(&[(0, Z), (1, X)], 0.9), term(&[(0, X), (1, X)], 0.5)],
        );
        let g = group_qubitwise(&h);
        assert_eq!(g.len(), 2);
        assert_eq!(g[0].members[0].coeff.re, 0.9);
        assert_eq!(g[1].len(), 2);
    }

    #[test]
    fn pattern_grouping_ignores_z_placement() {
        use Pauli::{X, Y, Z};
        let h = QubitOperator::from_terms(
            3,
            [
                term(&[(0, X), (2, X)], 0.5),
                term(&[(0, X), (1, Z), (2, X)], 0.4),
                term(&[(0, X), (1, X)], 0.3),
                term(&[(0, Y), (2, Y)], 0.2),
            ],
        );
        let g = group_with(&h, GroupingStrategy::XyPattern);
        assert_eq!(g.len(), 3);
        assert_eq!(g[0].len(), 2);
        let f = group_qubitwise(&h);
        assert_eq!(f.len(), 3);
        for grp in g.iter().chain(&f) {
            for a in &grp.members {
                for b in &grp.members {
                    assert!(a.string.qubitwise_commutes_with(&b.string));
                }
            }
        }
    }

    #[test]
    fn single_off_diagonal_group_has_unit_weight() {
        use Pauli::{X, Z};
        let h = QubitOperator::from_terms(2, [term(&[(0, Z)], 1.0), term(&[(0, X)], 0.4)]);
        let g = group_qubitwise(&h);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let d = sample_groups(&g, 5, GroupSampling::DiagonalAlways, &mut rng).unwrap();
        assert_eq!(d, vec![GroupDraw { index: 0, weight: 1.0 }, GroupDraw { index: 1, weight: 1.0 }]);
    }

    #[test]
    fn errors() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        assert!(matches!(sample_groups(&[], 1, GroupSampling::Plain, &mut rng), Err(QubitError::EmptyGroups)));
        let g = group_qubitwise(&QubitOperator::identity(1, 1.0));
        assert!(matches!(sample_groups(&g, 0, GroupSampling::Plain, &mut rng), Err(QubitError::ZeroDraws)));
    }

    #[test]
    fn weighted_reconstruction_is_unbiased() {
        use Pauli::{X, Y, Z};
        let h = QubitOperator::from_terms(
            3,
            [
                PauliTerm::identity(-1.0),
                term(&[(0, Z)], 0.4),
                term(&[(0, X), (1, X)], 0.3),
                term(&[(0, Y), (1, Y)], 0.2),
                term(&[(1, X), (2, Y)], -0.15),
                term(&[(0, X), (2, X)], 0.05),
            ],
        );
        let groups = group_qubitwise(&h);
        for mode in [GroupSampling::DiagonalAlways, GroupSampling::Plain] {
            let mut rng = ChaCha8Rng::seed_from_u64(7);
            let n = 100_000;
            let mut acc = QubitOperator::zero(3);
            for _ in 0..n {
                for d in sample_groups(&groups, 2, mode, &mut rng).unwrap() {
                    for t in &groups[d.index].members {
                        acc.add_term(PauliTerm::new(t.string, t.coeff * d.weight));
                    }
                }
            }
            let mean = acc.scaled(Complex64::new(1.0 / n as f64, 0.0));
            let total: f64 = groups
                .iter()
                .filter(|g| mode == GroupSampling::Plain || !g.is_diagonal)
                .map(|g| g.weight)
                .sum();
            for g in &groups {
                // per-draw count is Binomial(2, p); 5 standard errors of the mean
                let tol = if mode == GroupSampling::DiagonalAlways && g.is_diagonal {
                    1e-9
                } else {
                    let p = g.weight / total;
                    5.0 * ((1.0 - p) / (2.0 * p * n as f64)).sqrt()
                };
                for t in &g.members {
                    let got = mean.coefficient(&t.string);
                    assert!((got - t.coeff).norm() <= tol * t.coeff.norm(), "{mode:?} {} {got}", t.string);
                }
            }
        }
    }
}
