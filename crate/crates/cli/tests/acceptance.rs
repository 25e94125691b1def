//! Acceptance run: one `AC-k PASS` or `AC-k FAIL` line per criterion.

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::ExitCode;
use std::time::Instant;

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use treebraid_cli::run_oracle;
use treebraid_core::cup::push_to_normal_form_by;
use treebraid_core::{
    betti_numbers, check_type_preservation, class_of, classify, critical_cells, embed_t_min, flow,
    flow_infinity, lub, lub_by_scan, morse_boundary, non_flag_witness, phi_cocycle, raag_status,
    theta_cell, Cell, CellClass, CellStatus, Chain, Cochain, ConfigSpace, CupRing, Item, MorseData,
    PlaneTree, TreeSpec, Verdict,
};

type Outcome = Result<String, String>;
type Check = (&'static str, fn() -> Outcome);

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !($cond) {
            return Err(format!($($msg)+));
        }
    };
}

fn t_min(n: usize) -> ConfigSpace {
    ConfigSpace::new(PlaneTree::canonical_t_min(), n).unwrap()
}

fn h_shape() -> PlaneTree {
    let spec: TreeSpec = serde_json::from_str(
        r#"{"root": "r", "children": {"r": ["a"], "a": ["b", "c"], "c": ["d", "e"]}}"#,
    )
    .unwrap();
    PlaneTree::from_spec(&spec).unwrap()
}

/// Subdivided sample trees for the oracle comparison.
fn samples() -> Vec<(String, ConfigSpace)> {
    let mut out = Vec::new();
    for n in 2..=4 {
        out.push((
            format!("path n={n}"),
            ConfigSpace::new(PlaneTree::path(n + 2), n).unwrap(),
        ));
        out.push((
            format!("Y n={n}"),
            ConfigSpace::new(PlaneTree::star(3).subdivide_for(n).0, n).unwrap(),
        ));
        out.push((
            format!("H n={n}"),
            ConfigSpace::new(h_shape().subdivide_for(n).0, n).unwrap(),
        ));
    }
    out
}

fn ac1() -> Outcome {
    let b = betti_numbers(&t_min(4)).map_err(|e| e.to_string())?;
    ensure!(b == [1, 24, 6, 0, 0], "critical counts {b:?}");
    Ok(format!("critical counts {b:?}"))
}

fn ac2() -> Outcome {
    let mut instances: Vec<(String, ConfigSpace)> = (2..=4)
        .map(|n| (format!("T_min n={n}"), t_min(n)))
        .collect();
    instances.extend(samples());
    for (name, s) in &instances {
        let crit = betti_numbers(s).map_err(|e| format!("{name}: {e}"))?;
        let rep = run_oracle(s, 200_000, false).map_err(|e| format!("{name}: {e}"))?;
        ensure!(
            rep.mod2_betti == crit,
            "{name}: oracle {:?} vs critical {crit:?}",
            rep.mod2_betti
        );
    }
    let integral = run_oracle(&t_min(4), 200_000, true)
        .map_err(|e| e.to_string())?
        .integral
        .unwrap();
    ensure!(
        integral.torsion.is_empty(),
        "torsion {:?}",
        integral.torsion
    );
    ensure!(
        integral.free_ranks == [1, 24, 6, 0, 0],
        "free ranks {:?}",
        integral.free_ranks
    );
    Ok(format!("{} instances agree, no torsion", instances.len()))
}

fn ac3() -> Outcome {
    let mut count = 0;
    let mut instances: Vec<ConfigSpace> = (2..=4).map(t_min).collect();
    instances.extend(samples().into_iter().map(|(_, s)| s));
    for s in &instances {
        for dim in 0..=s.strands() {
            for c in critical_cells(s, dim) {
                let b = morse_boundary(s, &c).map_err(|e| e.to_string())?;
                ensure!(b.is_zero(), "nonzero Morse boundary on {c}");
                count += 1;
            }
        }
    }
    Ok(format!("{count} critical cells"))
}

const LISTED: [&str; 10] = [
    "{e7, e19, v4, v10}",
    "{e7, e16, v4, v13}",
    "{e7, e25, v4, v22}",
    "{e16, e25, v13, v22}",
    "{e19, e25, v10, v22}",
    "{e19, e16, v13, v14}",
    "{e19, e16, v13, v17}",
    "{e19, e16, v13, v10}",
    "{e19, e16, v13, v20}",
    "{e19, e16, v13, *}",
];

fn listed_class(s: &ConfigSpace, i: usize) -> CellClass {
    class_of(s.tree(), &s.parse_cell(LISTED[i - 1]).unwrap())
}

fn ac4() -> Outcome {
    let s = t_min(4);
    let t = s.tree();
    let crit: Vec<CellClass> = critical_cells(&s, 1)
        .iter()
        .map(|c| class_of(t, c))
        .collect();
    let mut bounds = BTreeMap::new();
    for i in 0..crit.len() {
        for j in i + 1..crit.len() {
            if let Some(k) =
                lub(t, &[crit[i].clone(), crit[j].clone()]).map_err(|e| e.to_string())?
            {
                ensure!(
                    bounds.insert(k.clone(), (i, j)).is_none(),
                    "two pairs bounded by {k}"
                );
            }
        }
    }
    let want: BTreeSet<CellClass> = (1..=10).map(|i| listed_class(&s, i)).collect();
    let got: BTreeSet<CellClass> = bounds.keys().cloned().collect();
    ensure!(got == want, "bounds {got:?}");
    Ok(format!("{} bounded pairs", bounds.len()))
}

fn alpha(s: &ConfigSpace, keep: impl Fn(&[usize]) -> bool) -> Cochain {
    let e16 = Item::edge(treebraid_core::EdgeRef::new(16).unwrap());
    Cochain::from_cells(
        1,
        s.enumerate(1).into_iter().filter(|c| {
            let counts = [0..=11usize, 13..=15, 17..=18, 19..=27]
                .map(|r| c.vertices().filter(|v| r.contains(v)).count());
            c.items().contains(&e16) && keep(&counts)
        }),
    )
    .unwrap()
}

fn ac5() -> Outcome {
    let s = t_min(4);
    let phi = |i: usize| phi_cocycle(&s, &listed_class(&s, i)).unwrap();
    let d = |a: Cochain| s.coboundary(&a).unwrap();
    // counts: [0..=11, 13..=15, 17..=18, 19..=27]
    ensure!(d(alpha(&s, |k| k[0] == 1 && k[1] == 2)) == phi(6), "alpha6");
    ensure!(
        d(alpha(&s, |k| k[0] == 1 && k[2] == 1 && k[1] == 1)) == phi(7),
        "alpha7"
    );
    ensure!(d(alpha(&s, |k| k[3] == 2 && k[1] == 1)) == phi(9), "alpha9");
    ensure!(
        d(alpha(&s, |k| k[1] == 1 && k[0] == 2)) == phi(8).add(&phi(10)),
        "alpha10"
    );
    Ok("four identities".into())
}

fn ac6() -> Outcome {
    let s = t_min(4);
    let ring = CupRing::new(s.clone(), 2).map_err(|e| e.to_string())?;
    let express = |i: usize| {
        ring.express_in_dual_basis(&phi_cocycle(&s, &listed_class(&s, i)).unwrap())
            .unwrap()
    };
    for i in [6, 7, 9] {
        ensure!(
            express(i).is_zero(),
            "class ({i}) gives {:?}",
            express(i).support()
        );
    }
    let eight = s.parse_cell(LISTED[7]).unwrap();
    let at = ring
        .basis(2)
        .unwrap()
        .iter()
        .position(|c| *c == eight)
        .ok_or("(8) is not critical")?;
    ensure!(
        express(10).support() == [at],
        "class (10) gives {:?}",
        express(10).support()
    );
    Ok("(6) (7) (9) vanish, (10) reduces to (8)".into())
}

fn ac7() -> Outcome {
    let s = t_min(4);
    let ring = CupRing::new(s.clone(), 3).map_err(|e| e.to_string())?;
    let rt = ring.ring_table().map_err(|e| e.to_string())?;
    ensure!(rt.basis1.len() == 24, "H^1 has rank {}", rt.basis1.len());
    ensure!(
        rt.pairing_rank == 6 && rt.radical_dim == 18,
        "rank {} radical {}",
        rt.pairing_rank,
        rt.radical_dim
    );
    ensure!(
        rt.products.len() == 7,
        "{} nonzero pairs",
        rt.products.len()
    );
    let cell = |t: &str| s.parse_cell(t).unwrap();
    let (b, b2, c) = (
        cell("{e19, v12, v11, v10}"),
        cell("{e19, v11, v10, *}"),
        cell("{e16, v13, v1, *}"),
    );
    let eight = cell(LISTED[7]);
    let at = rt
        .basis2
        .iter()
        .position(|x| *x == eight)
        .ok_or("(8) is not critical")?;
    for x in [&b, &b2] {
        let v = ring
            .cup(&[x.clone(), c.clone()])
            .map_err(|e| e.to_string())?;
        ensure!(v.support() == [at], "{x} with C gives {:?}", v.support());
    }
    Ok("rank 6, radical 18, 7 pairs".into())
}

fn ac8() -> Outcome {
    let tm = PlaneTree::canonical_t_min();
    for n in 4..=6 {
        ensure!(raag_status(&tm, n).0 == Verdict::NotRAAG, "T_min n={n}");
    }
    let linear = [
        PlaneTree::path(8),
        PlaneTree::star(3).subdivide_for(6).0,
        h_shape().subdivide_for(6).0,
    ];
    for t in &linear {
        ensure!(t.is_linear(), "sample is not linear");
        for n in 2..=6 {
            ensure!(
                raag_status(t, n).0 == Verdict::IsRAAG,
                "linear sample n={n}"
            );
        }
    }
    for t in [
        tm.clone(),
        h_shape(),
        PlaneTree::star(4),
        PlaneTree::path(4),
    ] {
        for n in 1..=3 {
            ensure!(raag_status(&t, n).0 == Verdict::IsRAAG, "n={n}");
        }
    }
    // The cohomological obstruction behind the negative verdict.
    let rt = CupRing::new(t_min(4), 3).unwrap().ring_table().unwrap();
    ensure!(
        non_flag_witness(&rt).is_some(),
        "no non-flag triangle in the product complex"
    );
    Ok("verdicts match, non-flag witness found".into())
}

fn ac9() -> Outcome {
    let start = Instant::now();
    let (host, _) = PlaneTree::canonical_t_min().subdivide_for(5);
    let emb = embed_t_min(&host, 5).map_err(|e| e.to_string())?;
    let report = check_type_preservation(&emb, 2).map_err(|e| e.to_string())?;
    ensure!(
        report.passed(),
        "{} type failures, first {:?}",
        report.failures.len(),
        report.failures.first()
    );
    let source = ConfigSpace::new(emb.source.clone(), 4).unwrap();
    let mut images = BTreeSet::new();
    let mut crit = 0;
    for dim in 0..=4 {
        for c in critical_cells(&source, dim) {
            images.insert(theta_cell(&c, &emb).map_err(|e| e.to_string())?);
            crit += 1;
        }
    }
    ensure!(
        images.len() == crit,
        "theta is not injective on critical cells"
    );
    ensure!(
        emb.basepoint_gap == 1,
        "basepoint segment crosses {} edges",
        emb.basepoint_gap
    );
    let secs = start.elapsed().as_secs_f64();
    if secs >= 300.0 {
        return Err(format!("took {secs:.1}s"));
    }
    Ok(format!("{} cells checked in {secs:.1}s", report.checked))
}

fn acyclic(space: &ConfigSpace, data: &MorseData, dim: usize) -> bool {
    let tree = space.tree();
    let redundant: Vec<Cell> = data
        .cells(dim)
        .filter(|(_, s)| *s == CellStatus::Redundant)
        .map(|(c, _)| c.clone())
        .collect();
    let index: HashMap<&Cell, usize> = redundant.iter().enumerate().map(|(i, c)| (c, i)).collect();
    let mut out = vec![Vec::new(); redundant.len()];
    let mut indeg = vec![0usize; redundant.len()];
    for (i, c) in redundant.iter().enumerate() {
        for (f, _) in data.matched_up(c).unwrap().faces_with_sign(tree).unwrap() {
            if let Some(&j) = index.get(&f).filter(|_| &f != c) {
                out[i].push(j);
                indeg[j] += 1;
            }
        }
    }
    let mut queue: VecDeque<usize> = (0..redundant.len()).filter(|&i| indeg[i] == 0).collect();
    let mut seen = 0;
    while let Some(i) = queue.pop_front() {
        seen += 1;
        for &j in &out[i] {
            indeg[j] -= 1;
            if indeg[j] == 0 {
                queue.push_back(j);
            }
        }
    }
    seen == redundant.len()
}

fn ac10() -> Outcome {
    let s = t_min(4);
    let t = s.tree();
    let mut rng = StdRng::seed_from_u64(2024);
    let cells: Vec<Vec<Cell>> = (0..=4).map(|d| s.enumerate(d)).collect();
    let pick = |rng: &mut StdRng, d: usize| cells[d][rng.random_range(0..cells[d].len())].clone();

    let data = MorseData::build(&s);
    for dim in 0..=4 {
        let above = if dim < 4 { data.counts(dim + 1).2 } else { 0 };
        ensure!(
            data.counts(dim).1 == above,
            "redundant/collapsible mismatch in dim {dim}"
        );
        ensure!(acyclic(&s, &data, dim), "gradient cycle in dim {dim}");
    }
    for _ in 0..200 {
        let d = rng.random_range(1..=3);
        let mut ch = Chain::zero(d);
        for _ in 0..3 {
            ch.add_term(pick(&mut rng, d), rng.random_range(-2..=2));
        }
        if d >= 2 {
            ensure!(s.boundary(&s.boundary(&ch)).is_zero(), "boundary squared");
        }
        ensure!(
            flow(&s, &s.boundary(&ch)) == s.boundary(&flow(&s, &ch)),
            "flow and boundary"
        );
        let co = Cochain::from_cells(d - 1, (0..20).map(|_| pick(&mut rng, d - 1))).unwrap();
        let up = pick(&mut rng, d);
        ensure!(
            s.coboundary(&co).unwrap().value(&up)
                == co.evaluate(&s.boundary(&Chain::from_cell(up.clone()))),
            "coboundary adjoint at {up}"
        );
    }
    for _ in 0..300 {
        let d = rng.random_range(0..=2);
        let c = pick(&mut rng, d);
        let stable = flow_infinity(&s, &Chain::from_cell(c.clone())).map_err(|e| e.to_string())?;
        ensure!(
            flow_infinity(&s, &stable).unwrap() == stable,
            "stable flow not idempotent at {c}"
        );
        if classify(t, &c) == CellStatus::Collapsible {
            ensure!(stable.is_zero(), "collapsible {c} survives");
        }
    }
    let ones: Vec<CellClass> = cells[1]
        .iter()
        .map(|c| class_of(t, c))
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    for _ in 0..300 {
        let k = rng.random_range(2..=3);
        let chosen: BTreeSet<CellClass> = (0..k)
            .map(|_| ones[rng.random_range(0..ones.len())].clone())
            .collect();
        let chosen: Vec<CellClass> = chosen.into_iter().collect();
        ensure!(
            lub(t, &chosen).unwrap() == lub_by_scan(&s, &chosen).unwrap(),
            "lub disagrees on {chosen:?}"
        );
    }
    let mut sampled = 0;
    for dim in 0..=2 {
        for crit in critical_cells(&s, dim) {
            let members = class_of(t, &crit).cells(t);
            let c = &members[rng.random_range(0..members.len())];
            for _ in 0..100 {
                let pushed = push_to_normal_form_by(t, c, |free| rng.random_range(0..free.len()));
                ensure!(pushed == crit, "{c} pushes to {pushed}, not {crit}");
            }
            sampled += 1;
        }
    }
    Ok(format!("{sampled} cells pushed under 100 orders each"))
}

fn main() -> ExitCode {
    let checks: [Check; 10] = [
        ("AC-1", ac1),
        ("AC-2", ac2),
        ("AC-3", ac3),
        ("AC-4", ac4),
        ("AC-5", ac5),
        ("AC-6", ac6),
        ("AC-7", ac7),
        ("AC-8", ac8),
        ("AC-9", ac9),
        ("AC-10", ac10),
    ];
    let mut failed = 0;
    for (name, check) in checks {
        let outcome = catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|p| {
            Err(p
                .downcast_ref::<String>()
                .cloned()
                .unwrap_or_else(|| "panicked".into()))
        });
        match outcome {
            Ok(note) => println!("{name} PASS ({note})"),
            Err(why) => {
                failed += 1;
                println!("{name} FAIL ({why})");
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
