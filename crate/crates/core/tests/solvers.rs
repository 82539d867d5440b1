mod common;

use common::{all_stable, edges_of, family};
use pairpref::oracle::enumerate_unpruned;
use pairpref::strong::{solve_strong, TraceEvent};
use pairpref::superstable::{solve_super, SuperRun};
use pairpref::{find_blocking, solve_weak, OrderClass, StabilityNotion};

#[test]
fn weak_solver_always_finds_a_weakly_stable_matching() {
    for k in 0..300 {
        let i = family(k, 7, OrderClass::Acyclic, OrderClass::Acyclic);
        let m = solve_weak(&i).unwrap();
        assert_eq!(find_blocking(StabilityNotion::Weak, &i, &m).unwrap(), None, "instance {k}");
    }
}

#[test]
fn strong_solver_agrees_with_oracle() {
    for k in 0..300 {
        let i = family(k, 5, OrderClass::Ties, OrderClass::Asymmetric);
        let stable = all_stable(&i, StabilityNotion::Strong);
        let out = solve_strong(&i).unwrap();
        assert_eq!(out.matching.is_some(), !stable.is_empty(), "instance {k}");
        if let Some(m) = &out.matching {
            assert_eq!(find_blocking(StabilityNotion::Strong, &i, m).unwrap(), None, "instance {k}");
        }
        let stable_edges = edges_of(&stable);
        for e in out.trace.iter().flat_map(TraceEvent::rejected_edges) {
            assert!(!stable_edges.contains(&e), "instance {k}: stable edge {e:?} rejected");
            assert!(e.1 < i.n_women(), "instance {k}: dummy edge rejected");
        }
        for &w in out.ever_active_women.iter().filter(|&&w| w < i.n_women()) {
            for m in &stable {
                assert!(m.partner_of_woman(w).is_some(), "instance {k}: ever-active woman {w} unmatched");
            }
        }
    }
}

#[test]
fn super_solver_agrees_with_oracle() {
    for k in 0..300 {
        let i = family(k, 5, OrderClass::Poset, OrderClass::Asymmetric);
        let stable = all_stable(&i, StabilityNotion::Super);
        let out = solve_super(&i).unwrap();
        assert_eq!(out.matching.is_some(), !stable.is_empty(), "instance {k}");
        if let Some(m) = &out.matching {
            assert_eq!(find_blocking(StabilityNotion::Super, &i, m).unwrap(), None, "instance {k}");
        }
        let stable_edges = edges_of(&stable);
        for e in &out.deleted {
            assert!(!stable_edges.contains(e), "instance {k}: stable edge {e:?} deleted");
        }
        for (w, proposers) in out.ever_proposed.iter().enumerate() {
            if !proposers.is_empty() {
                assert!(stable.iter().all(|m| m.partner_of_woman(w).is_some()), "instance {k}: woman {w}");
            }
        }
    }
}

#[test]
fn super_frontier_matches_recomputed_maximal_elements() {
    for k in 0..200 {
        let i = family(k, 6, OrderClass::Poset, OrderClass::Asymmetric);
        let mut run = SuperRun::new(&i).unwrap();
        loop {
            for u in 0..i.n_men() {
                let naive = i.man_relation(u).maximal_elements(&run.remaining(u)).unwrap();
                assert_eq!(run.frontier(u), naive, "instance {k}, man {u}");
            }
            if run.step().is_none() {
                break;
            }
        }
    }
}

#[test]
fn existence_does_not_depend_on_man_order() {
    for k in 0..150 {
        let i = family(k, 5, OrderClass::Ties, OrderClass::Asymmetric);
        let reversed: Vec<usize> = (0..i.n_men()).rev().collect();
        let j = i.permute_men(&reversed);
        let a = solve_strong(&i).unwrap().matching;
        let b = solve_strong(&j).unwrap().matching;
        assert_eq!(a.is_some(), b.is_some(), "instance {k}");
        if let Some(b) = b {
            assert_eq!(find_blocking(StabilityNotion::Strong, &j, &b).unwrap(), None);
        }
        let p = family(k, 5, OrderClass::Poset, OrderClass::Asymmetric);
        let q = p.permute_men(&(0..p.n_men()).rev().collect::<Vec<_>>());
        assert_eq!(solve_super(&p).unwrap().matching.is_some(), solve_super(&q).unwrap().matching.is_some());
    }
}

#[test]
fn pruned_oracle_matches_plain_enumeration() {
    let mut checked = 0;
    for k in 0..400 {
        let i = family(k, 4, OrderClass::Arbitrary, OrderClass::Arbitrary);
        if i.edges().len() > 12 {
            continue;
        }
        checked += 1;
        for notion in StabilityNotion::ALL {
            assert_eq!(all_stable(&i, notion), enumerate_unpruned(&i, notion), "instance {k} {notion}");
        }
    }
    assert!(checked > 100);
}
