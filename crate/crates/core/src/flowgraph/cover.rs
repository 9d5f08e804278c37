//! Minimum set cover over candidate paths.

use std::collections::BTreeMap;

use super::FlowError;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoverResult {
    /// Indices into the candidate list, ascending.
    pub chosen: Vec<usize>,
    /// False when the search budget ran out and the greedy answer was used.
    pub exact: bool,
}

#[derive(Clone, PartialEq, Eq)]
struct BitSet(Vec<u64>);

impl BitSet {
    fn new(len: usize) -> Self {
        BitSet(vec![0; len.div_ceil(64)])
    }

    fn insert(&mut self, i: usize) {
        self.0[i / 64] |= 1 << (i % 64);
    }

    fn union_with(&mut self, other: &BitSet) {
        for (a, b) in self.0.iter_mut().zip(&other.0) {
            *a |= b;
        }
    }

    fn is_subset(&self, other: &BitSet) -> bool {
        self.0.iter().zip(&other.0).all(|(a, b)| a & !b == 0)
    }

    fn count(&self) -> usize {
        self.0.iter().map(|w| w.count_ones() as usize).sum()
    }
}

/// Maps `universe` to dense bit positions and each candidate to a bit set.
/// Elements of a candidate outside the universe are ignored.
fn index(universe: &[usize], candidates: &[Vec<usize>]) -> Result<(BitSet, Vec<BitSet>), FlowError> {
    let dense: BTreeMap<usize, usize> = universe.iter().enumerate().map(|(i, &e)| (e, i)).collect();
    let width = dense.len();
    let sets: Vec<BitSet> = candidates
        .iter()
        .map(|c| {
            let mut s = BitSet::new(width);
            for e in c {
                if let Some(&i) = dense.get(e) {
                    s.insert(i);
                }
            }
            s
        })
        .collect();
    let mut all = BitSet::new(width);
    for s in &sets {
        all.union_with(s);
    }
    let mut full = BitSet::new(width);
    for i in 0..width {
        full.insert(i);
    }
    if all != full {
        let missing = dense
            .iter()
            .find(|(_, &i)| all.0[i / 64] & (1 << (i % 64)) == 0)
            .map(|(&e, _)| e)
            .expect("some element is uncovered");
        return Err(FlowError::UncoverableElement { element: missing });
    }
    Ok((full, sets))
}

/// Greedy cover: repeatedly takes the candidate adding the most uncovered
/// elements (lowest index on ties). Never smaller than the exact minimum.
pub fn greedy_cover(universe: &[usize], candidates: &[Vec<usize>]) -> Result<Vec<usize>, FlowError> {
    let (full, sets) = index(universe, candidates)?;
    let mut covered = BitSet::new(universe.len());
    let mut chosen = Vec::new();
    while covered != full {
        let (best, _) = sets
            .iter()
            .enumerate()
            .map(|(i, s)| {
                let mut u = covered.clone();
                u.union_with(s);
                (i, u.count())
            })
            .fold((0, 0), |acc, x| if x.1 > acc.1 { x } else { acc });
        covered.union_with(&sets[best]);
        chosen.push(best);
    }
    chosen.sort_unstable();
    Ok(chosen)
}

/// Exact minimum cover by increasing-cardinality subset search.
///
/// Candidates that are duplicates of, or contained in, another candidate are
/// dropped first; this does not change the minimum. If more than `budget`
/// subsets would be examined, falls back to [`greedy_cover`] and reports
/// `exact: false`.
pub fn min_cover(universe: &[usize], candidates: &[Vec<usize>], budget: u64) -> Result<CoverResult, FlowError> {
    let (full, sets) = index(universe, candidates)?;
    if universe.is_empty() {
        return Ok(CoverResult {
            chosen: Vec::new(),
            exact: true,
        });
    }
    let kept: Vec<usize> = (0..sets.len())
        .filter(|&i| {
            !(0..sets.len()).any(|j| j != i && sets[i].is_subset(&sets[j]) && (!sets[j].is_subset(&sets[i]) || j < i))
        })
        .collect();

    let mut evaluations: u64 = 0;
    for k in 1..=kept.len() {
        let mut combo: Vec<usize> = (0..k).collect();
        loop {
            evaluations += 1;
            if evaluations > budget {
                let chosen = greedy_cover(universe, candidates)?;
                return Ok(CoverResult { chosen, exact: false });
            }
            let mut u = BitSet::new(universe.len());
            for &c in &combo {
                u.union_with(&sets[kept[c]]);
            }
            if u == full {
                let chosen = combo.iter().map(|&c| kept[c]).collect();
                return Ok(CoverResult { chosen, exact: true });
            }
            if !next_combination(&mut combo, kept.len()) {
                break;
            }
        }
    }
    unreachable!("the union of all candidates covers the universe")
}

/// Advances `combo` to the next k-combination of `0..n` in lexicographic
/// order; returns false after the last one.
pub(crate) fn next_combination(combo: &mut [usize], n: usize) -> bool {
    let k = combo.len();
    for i in (0..k).rev() {
        if combo[i] < n - k + i {
            combo[i] += 1;
            for j in i + 1..k {
                combo[j] = combo[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Minimum by checking every subset; only for tiny instances.
    fn exhaustive(universe: &[usize], candidates: &[Vec<usize>]) -> usize {
        let n = candidates.len();
        (1u32..(1 << n))
            .filter(|mask| {
                universe
                    .iter()
                    .all(|e| (0..n).any(|i| mask & (1 << i) != 0 && candidates[i].contains(e)))
            })
            .map(|mask| mask.count_ones() as usize)
            .min()
            .unwrap()
    }

    #[test]
    fn single_candidate_covering_everything() {
        let u = vec![1, 2, 3];
        let c = vec![vec![1, 2, 3]];
        assert_eq!(greedy_cover(&u, &c).unwrap(), vec![0]);
        assert_eq!(min_cover(&u, &c, 1000).unwrap().chosen, vec![0]);
    }

    #[test]
    fn diamond_needs_both_paths() {
        // Entry 0, decision 1, branches 2 and 3, join 4.
        let u = vec![0, 1, 2, 3, 4];
        let c = vec![vec![0, 1, 2, 4], vec![0, 1, 3, 4]];
        assert_eq!(greedy_cover(&u, &c).unwrap().len(), 2);
        assert_eq!(min_cover(&u, &c, 1000).unwrap().chosen.len(), 2);
        assert_eq!(exhaustive(&u, &c), 2);
    }

    #[test]
    fn greedy_can_exceed_the_exact_minimum() {
        let u = vec![1, 2, 3, 4, 5, 6];
        let c = vec![
            vec![1, 2, 3, 4],
            vec![1, 2, 5],
            vec![3, 4, 6],
            vec![1],
            vec![5],
            vec![6],
        ];
        let greedy = greedy_cover(&u, &c).unwrap();
        let exact = min_cover(&u, &c, 1000).unwrap();
        assert_eq!(exhaustive(&u, &c), 2);
        assert_eq!(
            exact,
            CoverResult {
                chosen: vec![1, 2],
                exact: true
            }
        );
        assert_eq!(greedy.len(), 3);
        assert!(greedy.len() >= exact.chosen.len());
    }

    #[test]
    fn uncoverable_element_is_reported() {
        let err = greedy_cover(&[1, 9], &[vec![1]]).unwrap_err();
        assert_eq!(err, FlowError::UncoverableElement { element: 9 });
        assert!(min_cover(&[1, 9], &[vec![1]], 10).is_err());
    }

    #[test]
    fn exhausted_budget_falls_back_to_greedy() {
        let u = vec![1, 2, 3, 4, 5, 6];
        let c = vec![vec![1, 2, 3, 4], vec![1, 2, 5], vec![3, 4, 6], vec![5], vec![6]];
        let r = min_cover(&u, &c, 2).unwrap();
        assert!(!r.exact);
        assert_eq!(r.chosen.len(), 3);
    }

    #[test]
    fn empty_universe_needs_nothing() {
        let r = min_cover(&[], &[vec![1]], 10).unwrap();
        assert!(r.chosen.is_empty() && r.exact);
    }

    #[test]
    fn combinations_are_lexicographic() {
        let mut c = vec![0, 1];
        let mut seen = vec![c.clone()];
        while next_combination(&mut c, 4) {
            seen.push(c.clone());
        }
        assert_eq!(
            seen,
            vec![vec![0, 1], vec![0, 2], vec![0, 3], vec![1, 2], vec![1, 3], vec![2, 3]]
        );
    }

    #[test]
    fn exact_matches_exhaustive_on_small_random_instances() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for _ in 0..200 {
            let width = rng.gen_range(1..8);
            let n = rng.gen_range(1..8);
            let mut c: Vec<Vec<usize>> = (0..n)
                .map(|_| (0..width).filter(|_| rng.gen_bool(0.4)).collect())
                .collect();
            c.push((0..width).filter(|_| rng.gen_bool(0.2)).collect());
            // Make sure everything is coverable.
            for e in 0..width {
                if !c.iter().any(|s| s.contains(&e)) {
                    c[0].push(e);
                }
            }
            let u: Vec<usize> = (0..width).collect();
            let exact = min_cover(&u, &c, u64::MAX).unwrap();
            assert_eq!(exact.chosen.len(), exhaustive(&u, &c));
            assert!(greedy_cover(&u, &c).unwrap().len() >= exact.chosen.len());
        }
    }
}
