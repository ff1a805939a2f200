//! Executable checks for the architecture principles: bounded reactiveness
//! checking with replayable witnesses, bounded trace equivalence, and
//! chattering measurement.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::asm::{run_asm, Arch, Selection};
use crate::error::{Error, Result};
use crate::input::{History, InputAlphabet};

/// How the history space is explored.
#[derive(Debug, Clone, Copy)]
pub enum SearchMode {
    /// Enumerate every history up to the bound; errors if the space exceeds
    /// the budget (counted in histories).
    Exhaustive { budget: u64 },
    /// Uniformly sample `count` random histories with a fixed seed.
    Sample { count: u64, seed: u64 },
}

impl Default for SearchMode {
    fn default() -> Self {
        SearchMode::Exhaustive { budget: 2_000_000 }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Verdict {
    Reactive,
    NonReactive,
}

/// A pair of histories ending in the same visible input on which the
/// architecture selects different actions.
#[derive(Debug, Clone)]
pub struct ReactivenessWitness {
    pub history_a: History,
    pub history_b: History,
    pub selection_a: Selection,
    pub selection_b: Selection,
}

#[derive(Debug, Clone)]
pub struct ReactivenessReport {
    pub verdict: Verdict,
    pub witness: Option<ReactivenessWitness>,
    pub max_len: usize,
}

impl ReactivenessReport {
    pub fn is_reactive(&self) -> bool {
        self.verdict == Verdict::Reactive
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum EquivVerdict {
    EquivalentUpToBound,
    Distinguished,
}

/// A history on which the two architectures select different actions.
#[derive(Debug, Clone)]
pub struct EquivalenceWitness {
    pub history: History,
    pub selection_a: Selection,
    pub selection_b: Selection,
}

#[derive(Debug, Clone)]
pub struct EquivalenceReport {
    pub verdict: EquivVerdict,
    pub witness: Option<EquivalenceWitness>,
    pub max_len: usize,
}

impl EquivalenceReport {
    pub fn is_equivalent(&self) -> bool {
        self.verdict == EquivVerdict::EquivalentUpToBound
    }
}

fn space_size(alphabet: usize, max_len: usize) -> u128 {
    let mut total: u128 = 0;
    let mut pow: u128 = 1;
    for _ in 0..max_len {
        pow = pow.saturating_mul(alphabet as u128);
        total = total.saturating_add(pow);
    }
    total
}

/// Iterates index vectors for all histories of length 1..=max_len.
fn for_each_history(
    a: &InputAlphabet,
    max_len: usize,
    mut f: impl FnMut(&History) -> Result<bool>,
) -> Result<()> {
    for len in 1..=max_len {
        let mut idx = vec![0usize; len];
        loop {
            let h: History = idx.iter().map(|i| a.states()[*i].clone()).collect();
            if f(&h)? {
                return Ok(());
            }
            // odometer increment
            let mut pos = len;
            loop {
                if pos == 0 {
                    break;
                }
                pos -= 1;
                idx[pos] += 1;
                if idx[pos] < a.len() {
                    break;
                }
                idx[pos] = 0;
                if pos == 0 {
                    pos = usize::MAX;
                    break;
                }
            }
            if pos == usize::MAX {
                break;
            }
        }
    }
    Ok(())
}

fn random_history(a: &InputAlphabet, max_len: usize, rng: &mut ChaCha8Rng) -> History {
    let len = rng.gen_range(1..=max_len);
    (0..len)
        .map(|_| a.states()[rng.gen_range(0..a.len())].clone())
        .collect()
}

/// Searches for two histories sharing a final input on which `m` selects
/// different actions. Architecture selections are compared by action
/// identity: that is what an outside observer sees.
pub fn check_reactive(
    m: &Arch,
    a: &InputAlphabet,
    max_len: usize,
    mode: SearchMode,
) -> Result<ReactivenessReport> {
    use std::collections::HashMap;
    let mut seen: HashMap<Vec<(String, i64)>, (History, Selection)> = HashMap::new();
    let mut witness: Option<ReactivenessWitness> = None;

    let mut consider = |h: &History| -> Result<bool> {
        let sel = run_asm(m, h)?;
        let key = h.last().unwrap().visible_key();
        match seen.get(&key) {
            None => {
                seen.insert(key, (h.clone(), sel));
                Ok(false)
            }
            Some((h0, sel0)) => {
                if sel0.action != sel.action {
                    witness = Some(ReactivenessWitness {
                        history_a: h0.clone(),
                        history_b: h.clone(),
                        selection_a: sel0.clone(),
                        selection_b: sel.clone(),
                    });
                    Ok(true)
                } else {
                    Ok(false)
                }
            }
        }
    };

    match mode {
        SearchMode::Exhaustive { budget } => {
            let size = space_size(a.len(), max_len);
            if size > budget as u128 {
                return Err(Error::BudgetExceeded { size, budget });
            }
            for_each_history(a, max_len, &mut consider)?;
        }
        SearchMode::Sample { count, seed } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            for _ in 0..count {
                let h = random_history(a, max_len, &mut rng);
                if consider(&h)? {
                    break;
                }
            }
        }
    }

    // Witnesses must replay: re-run both histories and confirm the reported
    // divergence before handing the report out.
    if let Some(w) = &witness {
        let ra = run_asm(m, &w.history_a)?;
        let rb = run_asm(m, &w.history_b)?;
        debug_assert_eq!(ra, w.selection_a);
        debug_assert_eq!(rb, w.selection_b);
    }

    Ok(ReactivenessReport {
        verdict: if witness.is_some() {
            Verdict::NonReactive
        } else {
            Verdict::Reactive
        },
        witness,
        max_len,
    })
}

/// Compares two architectures' selected actions over all histories up to the
/// bound (or a seeded sample).
pub fn check_equivalence(
    m1: &Arch,
    m2: &Arch,
    a: &InputAlphabet,
    max_len: usize,
    mode: SearchMode,
) -> Result<EquivalenceReport> {
    let mut witness: Option<EquivalenceWitness> = None;
    let mut consider = |h: &History| -> Result<bool> {
        let s1 = run_asm(m1, h)?;
        let s2 = run_asm(m2, h)?;
        if s1.action != s2.action {
            witness = Some(EquivalenceWitness {
                history: h.clone(),
                selection_a: s1,
                selection_b: s2,
            });
            Ok(true)
        } else {
            Ok(false)
        }
    };

    match mode {
        SearchMode::Exhaustive { budget } => {
            let size = space_size(a.len(), max_len);
            if size > budget as u128 {
                return Err(Error::BudgetExceeded { size, budget });
            }
            for_each_history(a, max_len, &mut consider)?;
        }
        SearchMode::Sample { count, seed } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            for _ in 0..count {
                let h = random_history(a, max_len, &mut rng);
                if consider(&h)? {
                    break;
                }
            }
        }
    }

    Ok(EquivalenceReport {
        verdict: if witness.is_some() {
            EquivVerdict::Distinguished
        } else {
            EquivVerdict::EquivalentUpToBound
        },
        witness,
        max_len,
    })
}

/// Number of adjacent selection pairs with differing actions: the chattering
/// measure.
pub fn count_switches(trace: &[Selection]) -> usize {
    trace
        .windows(2)
        .filter(|w| w[0].action != w[1].action)
        .count()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::asm::{Arch, TickValue};
    use crate::cond::ConditionExpr;
    use crate::input::{ActionId, ValueName};
    use crate::tree::{action, fallback, sequence, until_success, KBTree, ReturnRule};
    use crate::worlds::scenarios;

    fn booleans(vars: &[&str]) -> InputAlphabet {
        InputAlphabet::booleans(vars).unwrap()
    }

    #[test]
    fn memoryless_tree_is_reactive() {
        let m = Arch::Tree(scenarios::recharge_bt());
        let a = InputAlphabet::product(&[("battery", vec![5, 50, 100])]).unwrap();
        let r = check_reactive(&m, &a, 3, SearchMode::default()).unwrap();
        assert!(r.is_reactive());
        assert!(r.witness.is_none());
    }

    #[test]
    fn dt_and_tr_are_reactive() {
        let dt = Arch::Dt(crate::classic::Dt::branch(
            ConditionExpr::eq("p", 1),
            crate::classic::Dt::leaf("A"),
            crate::classic::Dt::leaf("B"),
        ));
        let tr = Arch::Tr(scenarios::reactive_wall_follower());
        assert!(check_reactive(&dt, &booleans(&["p"]), 3, SearchMode::default())
            .unwrap()
            .is_reactive());
        let a = booleans(&["c11", "c12", "c21", "c31"]);
        assert!(check_reactive(&tr, &a, 2, SearchMode::default())
            .unwrap()
            .is_reactive());
    }

    #[test]
    fn hidden_flag_yields_replayable_witness() {
        let m = scenarios::recharge_bt_hidden_flag();
        let a = InputAlphabet::product(&[("battery", vec![5, 50, 100])]).unwrap();
        let r = check_reactive(&m, &a, 3, SearchMode::default()).unwrap();
        assert!(!r.is_reactive());
        let w = r.witness.expect("witness");
        // same visible final input, different actions, and both replay
        assert_eq!(
            w.history_a.last().unwrap().visible_key(),
            w.history_b.last().unwrap().visible_key()
        );
        assert_ne!(w.selection_a.action, w.selection_b.action);
        assert_eq!(run_asm(&m, &w.history_a).unwrap(), w.selection_a);
        assert_eq!(run_asm(&m, &w.history_b).unwrap(), w.selection_b);
    }

    #[test]
    fn memory_tree_yields_witness() {
        let m = Arch::Tree(scenarios::two_step_memory_tree());
        let r = check_reactive(&m, &booleans(&["a1", "a2"]), 3, SearchMode::default()).unwrap();
        assert!(!r.is_reactive());
        assert!(r.witness.is_some());
    }

    #[test]
    fn until_success_yields_witness() {
        let step = |name: &str, var: &str| {
            action(
                name,
                ReturnRule::running().when(ConditionExpr::eq(var, 1), ValueName::success()),
            )
        };
        let t = KBTree::classic(
            sequence(vec![until_success(step("X", "x")), step("Y", "y")]).unwrap(),
        )
        .unwrap();
        let r = check_reactive(&Arch::Tree(t), &booleans(&["x", "y"]), 3, SearchMode::default())
            .unwrap();
        assert!(!r.is_reactive());
    }

    #[test]
    fn fsm_yields_witness() {
        let m = Arch::Fsm(scenarios::recharge_fsm());
        let a = InputAlphabet::product(&[("battery", vec![5, 50, 100])]).unwrap();
        let r = check_reactive(&m, &a, 3, SearchMode::default()).unwrap();
        assert!(!r.is_reactive());
    }

    #[test]
    fn budget_exceeded_is_an_error() {
        let m = Arch::Tree(scenarios::recharge_bt());
        let a = InputAlphabet::product(&[("battery", vec![5, 50, 100])]).unwrap();
        assert!(matches!(
            check_reactive(&m, &a, 10, SearchMode::Exhaustive { budget: 100 }),
            Err(Error::BudgetExceeded { .. })
        ));
    }

    #[test]
    fn sampling_finds_the_hidden_flag_too() {
        let m = scenarios::recharge_bt_hidden_flag();
        let a = InputAlphabet::product(&[("battery", vec![5, 50, 100])]).unwrap();
        let r =
            check_reactive(&m, &a, 4, SearchMode::Sample { count: 2000, seed: 42 }).unwrap();
        assert!(!r.is_reactive());
    }

    #[test]
    fn sequence_vs_fallback_distinguished_with_witness() {
        let leaf = |name: &str, var: &str| {
            action(
                name,
                ReturnRule::running().when(ConditionExpr::eq(var, 1), ValueName::success()),
            )
        };
        let s = Arch::Tree(
            KBTree::classic(sequence(vec![leaf("A", "a"), leaf("B", "b")]).unwrap()).unwrap(),
        );
        let f = Arch::Tree(
            KBTree::classic(fallback(vec![leaf("A", "a"), leaf("B", "b")]).unwrap()).unwrap(),
        );
        let r = check_equivalence(&s, &f, &booleans(&["a", "b"]), 2, SearchMode::default())
            .unwrap();
        assert!(!r.is_equivalent());
        let w = r.witness.unwrap();
        assert_ne!(
            run_asm(&s, &w.history).unwrap().action,
            run_asm(&f, &w.history).unwrap().action
        );
    }

    #[test]
    fn memory_emulation_equivalent_to_bound() {
        let m1 = Arch::Tree(scenarios::two_step_memory_tree());
        let m2 = scenarios::two_step_flag_emulation();
        let r = check_equivalence(&m1, &m2, &booleans(&["a1", "a2"]), 4, SearchMode::default())
            .unwrap();
        assert!(r.is_equivalent(), "witness: {:?}", r.witness);
    }

    #[test]
    fn count_switches_counts_action_changes_only() {
        let sel = |n: &str| crate::asm::Selection {
            action: ActionId::new(n),
            value: TickValue::Unhandled(None),
        };
        assert_eq!(count_switches(&[]), 0);
        assert_eq!(count_switches(&[sel("a")]), 0);
        assert_eq!(count_switches(&[sel("a"), sel("a"), sel("b"), sel("a")]), 2);
    }
}
