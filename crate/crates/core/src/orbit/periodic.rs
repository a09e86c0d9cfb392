//! Full periodic-orbit enumeration at a given base period: base cycles are
//! enumerated exactly, then every fiber fixed point of the cycle's composed
//! fiber map contributes one skew-product orbit.

use serde::{Deserialize, Serialize};

use super::enumerate::{shift_words, torus_periodic_points};
use super::fiber_fixed::{find_fiber_fixed_points, ComposedFiberMap};
use super::{Itinerary, OrbitError, PeriodicOrbit, TorusRational};
use crate::model::SkewProductSystem;

/// Resource limits for orbit enumeration.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct OrbitBudget {
    /// Max number of base cycles examined.
    pub max_base_cycles: usize,
    /// Max number of orbits returned.
    pub max_orbits: usize,
    /// Fixed-point scan resolution.
    pub grid: usize,
    /// Fixed-point refinement tolerance.
    pub tol: f64,
}

impl Default for OrbitBudget {
    fn default() -> Self {
        OrbitBudget {
            max_base_cycles: 4096,
            max_orbits: 8192,
            grid: 4096,
            tol: 1e-12,
        }
    }
}

/// Enumerates all periodic orbits whose base period is exactly `n`.
///
/// Symbolic bases enumerate primitive admissible words up to rotation; torus
/// bases enumerate rational periodic points and group them into cycles. Each
/// base cycle then yields one orbit per fixed point of the composed fiber map
/// (or one per grid sample when the composition degenerates to the identity).
pub fn periodic_orbits(
    system: &SkewProductSystem,
    n: u32,
    budget: &OrbitBudget,
) -> Result<Vec<PeriodicOrbit>, OrbitError> {
    let mut orbits = match system {
        SkewProductSystem::Symbolic(sys) => {
            let words = shift_words(sys.base(), n, true)?;
            if words.len() > budget.max_base_cycles {
                return Err(OrbitError::BudgetExceeded {
                    what: "symbolic base cycles",
                    needed: words.len(),
                    limit: budget.max_base_cycles,
                });
            }
            let mut out = Vec::new();
            for word in words {
                let comp =
                    ComposedFiberMap::new(word.iter().map(|&s| *sys.map(s)).collect());
                let scan = find_fiber_fixed_points(&comp, budget.grid, budget.tol);
                for fp in &scan.points {
                    let path = super::path::word_fiber_path(sys, &word, fp.t);
                    out.push(PeriodicOrbit::from_fiber_path(
                        system,
                        Itinerary::Word(word.clone()),
                        path,
                    )?);
                    if out.len() > budget.max_orbits {
                        return Err(OrbitError::BudgetExceeded {
                            what: "orbits",
                            needed: out.len(),
                            limit: budget.max_orbits,
                        });
                    }
                }
            }
            out
        }
        SkewProductSystem::Torus(sys) => {
            let points = torus_periodic_points(sys.base(), n)?;
            let cycles = group_cycles(sys.base(), &points, n as usize)?;
            if cycles.len() > budget.max_base_cycles {
                return Err(OrbitError::BudgetExceeded {
                    what: "torus base cycles",
                    needed: cycles.len(),
                    limit: budget.max_base_cycles,
                });
            }
            let mut out = Vec::new();
            for cycle in cycles {
                let maps: Vec<_> = cycle.iter().map(|x| sys.fiber_at(x.floats())).collect();
                let comp = ComposedFiberMap::new(maps.clone());
                let scan = find_fiber_fixed_points(&comp, budget.grid, budget.tol);
                if out.len() + scan.points.len() > budget.max_orbits {
                    return Err(OrbitError::BudgetExceeded {
                        what: "orbits",
                        needed: out.len() + scan.points.len(),
                        limit: budget.max_orbits,
                    });
                }
                for fp in &scan.points {
                    let mut path = Vec::with_capacity(cycle.len());
                    let mut t = fp.t;
                    for f in &maps {
                        path.push(t);
                        t = f.apply(t);
                    }
                    out.push(PeriodicOrbit::from_fiber_path(
                        system,
                        Itinerary::Torus(cycle[0]),
                        path,
                    )?);
                }
            }
            out
        }
    };
    orbits.sort_by(|a, b| orbit_sort_key(a).cmp(&orbit_sort_key(b)));
    Ok(orbits)
}

/// Groups period-n lattice points into exact n-cycles; points of strictly
/// smaller period are dropped. Each cycle is listed from its smallest point.
fn group_cycles(
    base: &crate::model::TorusBase,
    points: &[TorusRational],
    n: usize,
) -> Result<Vec<Vec<TorusRational>>, OrbitError> {
    let mut seen: std::collections::HashSet<TorusRational> = std::collections::HashSet::new();
    let mut cycles = Vec::new();
    for &p in points {
        if seen.contains(&p) {
            continue;
        }
        let mut cycle = vec![p];
        let mut q = p.apply(base);
        while q != p {
            cycle.push(q);
            q = q.apply(base);
            if cycle.len() > n {
                return Err(OrbitError::Inconsistent(
                    "lattice point does not return within the stated period",
                ));
            }
        }
        for &x in &cycle {
            seen.insert(x);
        }
        if cycle.len() == n {
            let min_idx = cycle
                .iter()
                .enumerate()
                .min_by_key(|(_, x)| **x)
                .map(|(i, _)| i)
                .unwrap_or(0);
            cycle.rotate_left(min_idx);
            cycles.push(cycle);
        }
    }
    cycles.sort_by(|a, b| a[0].cmp(&b[0]));
    Ok(cycles)
}

fn orbit_sort_key(o: &PeriodicOrbit) -> (u8, Vec<u8>, [i64; 2], i64, i64) {
    match &o.itinerary {
        Itinerary::Word(w) => (
            0,
            w.clone(),
            [0, 0],
            0,
            (o.fiber_path[0] * 1e12) as i64,
        ),
        Itinerary::Torus(x) => (
            1,
            Vec::new(),
            x.num(),
            x.den(),
            (o.fiber_path[0] * 1e12) as i64,
        ),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{CircleFiberMap, Modulation, TorusBase, TorusSkew};
    use crate::orbit::Stability;

    #[test]
    fn symbolic_period_one_orbits() {
        let sys = SkewProductSystem::default_symbolic();
        let orbits = periodic_orbits(&sys, 1, &OrbitBudget::default()).unwrap();
        // Words 0 and 1, two fiber fixed points each.
        assert_eq!(orbits.len(), 4);
        let over_one: Vec<_> = orbits
            .iter()
            .filter(|o| o.itinerary == Itinerary::Word(vec![1]))
            .collect();
        assert_eq!(over_one.len(), 2);
        let band = over_one
            .iter()
            .find(|o| crate::numeric::circle_dist(o.fiber_start(), 0.5) < 0.01)
            .unwrap();
        assert_eq!(band.stability, Stability::Repelling);
        assert!((band.center_exponent - 1.8f64.ln()).abs() < 1e-10);
    }

    #[test]
    fn symbolic_period_two_has_single_base_cycle() {
        let sys = SkewProductSystem::default_symbolic();
        let orbits = periodic_orbits(&sys, 2, &OrbitBudget::default()).unwrap();
        assert!(orbits
            .iter()
            .all(|o| o.itinerary == Itinerary::Word(vec![0, 1])));
        assert!(!orbits.is_empty());
        for o in &orbits {
            assert!(o.step_defect < 1e-9);
        }
    }

    #[test]
    fn torus_identity_fibers_are_degenerate_at_the_fixed_point() {
        let base = TorusBase::standard();
        let fiber = CircleFiberMap::new(0.0, 0.0).unwrap();
        let skew = TorusSkew::new(base, fiber, Modulation::Constant).unwrap();
        let sys = SkewProductSystem::Torus(skew);
        let budget = OrbitBudget {
            grid: 64,
            max_orbits: 128,
            ..OrbitBudget::default()
        };
        let orbits = periodic_orbits(&sys, 1, &budget).unwrap();
        // One base point (the origin), identity fiber: one orbit per grid
        // sample, all neutral.
        assert_eq!(orbits.len(), 64);
        assert!(orbits.iter().all(|o| o.stability == Stability::Neutral));
        assert!(orbits
            .iter()
            .all(|o| matches!(&o.itinerary, Itinerary::Torus(x) if x.num() == [0, 0])));
    }

    #[test]
    fn torus_period_two_cycles_close_up() {
        let sys = SkewProductSystem::default_torus();
        let orbits = periodic_orbits(&sys, 2, &OrbitBudget::default()).unwrap();
        assert!(!orbits.is_empty());
        for o in &orbits {
            assert_eq!(o.period, 2);
            assert!(o.validate(&sys).unwrap() < 1e-9);
        }
    }

    #[test]
    fn budget_violation_is_reported() {
        let sys = SkewProductSystem::default_symbolic();
        let budget = OrbitBudget {
            max_orbits: 2,
            ..OrbitBudget::default()
        };
        assert!(matches!(
            periodic_orbits(&sys, 3, &budget),
            Err(OrbitError::BudgetExceeded { .. })
        ));
    }
}
