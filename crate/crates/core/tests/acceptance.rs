//! Acceptance suite: one line per criterion, non-zero exit if any fails.
//!
//! All criteria are exact: every comparison is on integers or tables, with
//! zero tolerance.

use cycleset::classify::*;
use cycleset::cycle_set::verify_ybe;
use cycleset::extension::*;
use cycleset::iso::canonical_form;
use cycleset::oracle::{crosscheck_pq, enumerate_all, OracleOptions};
use cycleset::structure::*;
use cycleset::{CycleSet, Permutation};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::collections::BTreeSet;
use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

type Outcome = Result<String, String>;

/// Groups up to this order are materialized for brace-level checks.
const BRACE_LIMIT: usize = 4_000_000;
/// pqr instances used for the soundness and socle criteria.
const PQR_GROUP_CAP: u64 = 300_000;
const PQR_BUDGET: usize = 8;

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn all_pq_builds() -> Vec<(String, CycleSet)> {
    let mut out = Vec::new();
    for (m, k) in [(2, 3), (3, 2), (2, 5), (5, 2), (3, 5), (5, 3)] {
        for g in vectors(m, k as u64) {
            if let Ok(x) = build_pq(&PqSpec::new(m, k, g.clone())) {
                out.push((format!("pq({m},{k},{g:?})"), x));
            }
        }
    }
    out
}

struct Corpus {
    /// Constructor outputs checked by criteria 1 and 5.
    core: Vec<(String, CycleSet)>,
    /// Every squarefree indecomposable instance produced.
    squarefree: Vec<(String, CycleSet)>,
}

fn corpus() -> Result<Corpus, String> {
    let mut core: Vec<(String, CycleSet)> = (1..=12)
        .map(|n| (format!("cyclic({n})"), cyclic_cycle_set(n)))
        .collect();
    core.extend(all_pq_builds());
    let mut squarefree: Vec<(String, CycleSet)> = core
        .iter()
        .filter(|(_, x)| is_squarefree(x.n()))
        .cloned()
        .collect();
    let mut pqr = 0;
    for (p, q, r) in [(2, 3, 5), (2, 3, 7)] {
        let e = enumerate_pqr(p, q, r, PQR_BUDGET).map_err(|e| e.to_string())?;
        for m in e.members {
            let name = format!("{}({p},{q},{r},{})", m.family, m.parameters);
            if m.group_order <= PQR_GROUP_CAP {
                core.push((name.clone(), m.cycle_set.clone()));
                pqr += 1;
            }
            squarefree.push((name, m.cycle_set));
        }
    }
    if pqr < 50 {
        return Err(format!("only {pqr} pqr instances"));
    }
    Ok(Corpus { core, squarefree })
}

fn is_squarefree(n: usize) -> bool {
    (2..=n).all(|d| n % (d * d) != 0)
}

fn criterion_1(c: &Corpus) -> Outcome {
    for (name, x) in &c.core {
        CycleSet::validate(&x.rows()).map_err(|e| format!("{name}: {e}"))?;
        let r = verify_ybe(&x.to_solution());
        ensure(r.passed(), || format!("{name}: {:?}", r.witnesses))?;
    }
    let pqr = c.core.iter().filter(|(n, _)| n.starts_with("pqr")).count();
    Ok(format!(
        "{} cycle sets ({pqr} pqr), axioms and YBE exhaustive",
        c.core.len()
    ))
}

fn random_relabel(x: &CycleSet, rng: &mut ChaCha8Rng) -> CycleSet {
    let mut p: Vec<usize> = (0..x.n()).collect();
    p.shuffle(rng);
    x.relabel(&Permutation::from_images(p).unwrap())
}

fn criterion_2() -> Outcome {
    let mut pool: Vec<CycleSet> = Vec::new();
    for n in 1..=5 {
        pool.extend(
            enumerate_all(n, &OracleOptions::default())
                .map_err(|e| e.to_string())?
                .members,
        );
    }
    let six = OracleOptions {
        indecomposable: true,
        up_to_iso: true,
        ..OracleOptions::default()
    };
    pool.extend(enumerate_all(6, &six).map_err(|e| e.to_string())?.members);
    for n in 7..=10 {
        pool.push(cyclic_cycle_set(n));
    }
    for (m, k) in [(2, 4), (4, 2), (3, 3)] {
        for g in vectors(m, k as u64) {
            let x = CycleSet::from_fn(m * k, |u, v| {
                ((v / k + 1) % m) * k + (v % k + g[(v / k + m - u / k) % m] as usize) % k
            });
            pool.extend(x.ok());
        }
    }
    for (m, k) in [(2, 5), (5, 2)] {
        for g in vectors(m, k as u64) {
            if let Ok(x) = build_pq(&PqSpec::new(m, k, g)) {
                pool.push(x);
            }
        }
    }
    // Sample a size first so that the many labeled tables of size 5 do not dominate.
    let sizes: Vec<usize> = pool
        .iter()
        .map(CycleSet::n)
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    let by_size: Vec<Vec<&CycleSet>> = sizes
        .iter()
        .map(|&n| pool.iter().filter(|x| x.n() == n).collect())
        .collect();
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for i in 0..1000 {
        let bucket = &by_size[rng.gen_range(0..by_size.len())];
        let x = random_relabel(bucket[rng.gen_range(0..bucket.len())], &mut rng);
        let back =
            CycleSet::from_solution(&x.to_solution()).map_err(|e| format!("sample {i}: {e}"))?;
        ensure(back == x, || {
            format!("sample {i}: round trip changed the table")
        })?;
    }
    Ok(format!(
        "1000 samples from a pool of {}, sizes {:?}",
        pool.len(),
        sizes
    ))
}

fn criterion_3() -> Outcome {
    let opts = OracleOptions {
        indecomposable: true,
        up_to_iso: true,
        ..OracleOptions::default()
    };
    for n in [2, 3, 5] {
        let e = enumerate_all(n, &opts).map_err(|e| e.to_string())?;
        ensure(e.members.len() == 1, || {
            format!("n={n}: {} classes", e.members.len())
        })?;
        ensure(
            canonical_form(&e.members[0]) == canonical_form(&cyclic_cycle_set(n)),
            || format!("n={n}: the class is not cyclic"),
        )?;
    }
    Ok("n = 2, 3, 5: one indecomposable class each, cyclic".into())
}

fn criterion_4() -> Outcome {
    let r = crosscheck_pq(6, &OracleOptions::default()).map_err(|e| e.to_string())?;
    ensure(r.passed(), || format!("{:?}", r.witnesses))?;
    ensure(
        r.metrics["oracle_mpl1"] == 1 && r.metrics["oracle_other"] == 0,
        || format!("{:?}", r.metrics),
    )?;
    ensure(
        r.metrics["oracle_mpl2"] == r.metrics["classification_classes"],
        || format!("{:?}", r.metrics),
    )?;
    Ok(format!(
        "oracle {} classes = 1 cyclic + {} mpl-2, all classified; classification {} classes, all found",
        r.metrics["oracle_classes"], r.metrics["oracle_mpl2"], r.metrics["classification_classes"]
    ))
}

fn criterion_5(c: &Corpus) -> Outcome {
    for (name, x) in &c.core {
        let r = verify_soc_equals_ker_ret_with_limit(x, BRACE_LIMIT)
            .map_err(|e| format!("{name}: {e}"))?;
        ensure(r.passed(), || format!("{name}: {:?}", r.witnesses))?;
    }
    Ok(format!(
        "{} instances, socle = kernel of the retraction map",
        c.core.len()
    ))
}

fn criterion_6(c: &Corpus) -> Outcome {
    let mut checked = 0;
    for (name, x) in &c.squarefree {
        if !is_indecomposable(x) {
            continue;
        }
        let r = cedo_okninski_checks(x).map_err(|e| format!("{name}: {e}"))?;
        ensure(r.passed(), || format!("{name}: {:?}", r.witnesses))?;
        checked += 1;
    }
    Ok(format!("{checked} squarefree indecomposable instances"))
}

/// Case-1 and case-2 routes for one prime assignment, at most `per` of each.
fn twisted_instances(p: u64, q: u64, r: u64, per: usize) -> Vec<(String, ModuleRoute, CycleSet)> {
    let mut out = Vec::new();
    let small = |x: &CycleSet| {
        describe(x, "", serde_json::Value::Null)
            .map_or(false, |m| m.group_order as usize <= BRACE_LIMIT)
    };
    let gammas: Vec<Vec<u64>> = vectors(p as usize, q).collect();
    let mut taken = 0;
    'c1: for g in &gammas {
        for phi in
            vectors((q + p - 1) as usize, r).filter(|v| v.iter().find(|&&a| a != 0) == Some(&1))
        {
            let spec = PqrCase1Spec {
                p,
                q,
                r,
                gamma0: g.clone(),
                phi1: phi[..q as usize].to_vec(),
                phi2: phi[q as usize..].to_vec(),
            };
            if let (Ok(x), Ok(route)) = (build_pqr_case1(&spec), case1_route(&spec)) {
                if small(&x) {
                    out.push((format!("{spec:?}"), route, x));
                    taken += 1;
                    if taken == per {
                        break 'c1;
                    }
                }
            }
        }
    }
    let mut taken = 0;
    'c2: for g in &gammas {
        for xi in vectors(p as usize - 1, r) {
            for c in vectors(p as usize, r) {
                let spec = PqrCase2Spec {
                    p,
                    q,
                    r,
                    gamma0: g.clone(),
                    xi: xi.clone(),
                    c,
                };
                if let (Ok(x), Ok(route)) = (build_pqr_case2(&spec), case2_route(&spec)) {
                    if small(&x) {
                        out.push((format!("{spec:?}"), route, x));
                        taken += 1;
                        if taken == per {
                            break 'c2;
                        }
                    }
                }
            }
        }
    }
    out
}

fn criterion_7() -> Outcome {
    let mut count = 0;
    let mut cases = BTreeSet::new();
    let mut sizes = BTreeSet::new();
    for (p, q, r) in [
        (2, 3, 5),
        (3, 2, 5),
        (2, 5, 3),
        (2, 3, 7),
        (3, 2, 7),
        (2, 7, 3),
        (3, 7, 2),
    ] {
        for (name, route, direct) in twisted_instances(p, q, r, 3) {
            let phi =
                phi_from_phi0(&route.module, 0, &route.phi0).map_err(|e| format!("{name}: {e}"))?;
            let (y, _) =
                twisted_extension(&route.module, &phi).map_err(|e| format!("{name}: {e}"))?;
            ensure(y == direct, || {
                format!("{name}: module route differs from the direct table")
            })?;
            let rep = semidirect_check(&route.module, &phi, BRACE_LIMIT)
                .map_err(|e| format!("{name}: {e}"))?;
            ensure(rep.passed(), || format!("{name}: {:?}", rep.witnesses))?;
            let (g, b, k) = (
                &rep.metrics["group_order"],
                &rep.metrics["base_group_order"],
                &rep.metrics["kernel_order"],
            );
            ensure(
                g.as_u64() == Some(b.as_u64().unwrap() * k.as_u64().unwrap()),
                || format!("{name}: {g} ≠ {b}·{k}"),
            )?;
            cases.insert(name.split(' ').next().unwrap().to_string());
            sizes.insert(y.n());
            count += 1;
        }
    }
    ensure(count >= 20, || format!("only {count} instances"))?;
    ensure(cases.len() == 2 && sizes.len() == 2, || {
        format!("cases {cases:?}, sizes {sizes:?}")
    })?;
    Ok(format!(
        "{count} extensions, cases {cases:?}, sizes {sizes:?}"
    ))
}

fn z2_modules() -> Vec<(&'static str, GradedModule)> {
    let base = cyclic_cycle_set(2);
    let sign = GradedModule::new(
        base.clone(),
        vec![vec![3], vec![3]],
        vec![vec![vec![vec![2]]; 2]; 2],
    )
    .unwrap();
    vec![
        ("permutation", GradedModule::permutation_module(&base, &[3])),
        ("sign", sign),
    ]
}

fn all_z2_maps(m: &GradedModule) -> Vec<Cocycle> {
    vectors(4, 3)
        .map(|v| Cocycle::from_fn(m, |x, y| vec![v[x * 2 + y]]))
        .collect()
}

/// Φ⁰ averaged over the stabilizer of 0, so it is stabilizer-equivariant.
fn random_phi0(m: &GradedModule, rng: &mut ChaCha8Rng) -> Vec<Elem> {
    let n = m.base().n();
    let raw: Vec<Elem> = (0..n)
        .map(|y| {
            let sparse = rng.gen_bool(0.5);
            m.component(y)
                .iter()
                .map(|&d| {
                    if sparse && rng.gen_bool(0.7) {
                        0
                    } else {
                        rng.gen_range(0..d)
                    }
                })
                .collect()
        })
        .collect();
    let stab = m.group().stabilizer(0);
    (0..n)
        .map(|y| {
            stab.iter().fold(m.zero(y), |acc, &h| {
                let pre = m.group().apply_inverse(h, y);
                m.add(y, &acc, &m.act(h, pre, &raw[pre]))
            })
        })
        .collect()
}

fn criterion_8() -> Outcome {
    let mut small = 0;
    let mut tally = [0usize; 2];
    for (name, m) in z2_modules() {
        for phi in all_z2_maps(&m) {
            if !check_equivariance(&m, &phi, true) || !is_twisted_cocycle(&m, &phi) {
                continue;
            }
            let crit = indecomposability_criterion(&m, &phi).map_err(|e| e.to_string())?;
            let actual =
                is_indecomposable(&twisted_extension(&m, &phi).map_err(|e| e.to_string())?.0);
            ensure(crit == actual, || {
                format!("{name} module, Φ = {:?}", phi.values)
            })?;
            small += 1;
            tally[usize::from(actual)] += 1;
        }
    }
    let modules: Vec<GradedModule> = [
        PqrCase2Spec {
            p: 2,
            q: 3,
            r: 7,
            gamma0: vec![0, 1],
            xi: vec![2],
            c: vec![0, 1],
        },
        PqrCase2Spec {
            p: 3,
            q: 2,
            r: 5,
            gamma0: vec![0, 0, 1],
            xi: vec![1, 4],
            c: vec![0, 1, 0],
        },
    ]
    .iter()
    .map(|s| case2_route(s).unwrap().module)
    .chain(
        [
            (2, 3, vec![0, 1], 5),
            (2, 3, vec![0, 1], 7),
            (3, 2, vec![0, 1, 1], 5),
            (3, 2, vec![0, 0, 1], 7),
        ]
        .into_iter()
        .map(|(m, k, g, r)| {
            GradedModule::permutation_module(&build_pq(&PqSpec::new(m, k, g)).unwrap(), &[r])
        }),
    )
    .collect();
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut sizes = BTreeSet::new();
    for i in 0..200 {
        let m = &modules[i % modules.len()];
        let phi0 = random_phi0(m, &mut rng);
        let phi = phi_from_phi0(m, 0, &phi0).map_err(|e| format!("sample {i}: {e}"))?;
        let crit = indecomposability_criterion(m, &phi).map_err(|e| format!("sample {i}: {e}"))?;
        let (y, _) = twisted_extension(m, &phi).map_err(|e| format!("sample {i}: {e}"))?;
        let actual = is_indecomposable(&y);
        ensure(crit == actual, || {
            format!("sample {i}: criterion {crit}, extension {actual}")
        })?;
        sizes.insert(y.n());
        tally[usize::from(actual)] += 1;
    }
    ensure(tally[0] > 0 && tally[1] > 0, || {
        format!("only one outcome seen: {tally:?}")
    })?;
    Ok(format!(
        "{small} maps on Z_2 by Z_3 + 200 random at sizes {sizes:?}; {} indecomposable, {} decomposable",
        tally[1], tally[0]
    ))
}

fn criterion_9() -> Outcome {
    let mut count = 0;
    for (p, q) in [(2, 3), (3, 2), (2, 5)] {
        for g in vectors(p, q as u64) {
            let spec = PqSpec::new(p, q, g);
            if spec.validate().is_err() {
                continue;
            }
            let r = stabilizer_orbit_check(&spec).map_err(|e| format!("{spec:?}: {e}"))?;
            ensure(r.passed(), || format!("{spec:?}: {:?}", r.witnesses))?;
            count += 1;
        }
    }
    Ok(format!("{count} admissible Γ⁰"))
}

fn criterion_10() -> Outcome {
    let mut summary = Vec::new();
    for (name, m) in z2_modules() {
        let maps = all_z2_maps(&m);
        let equivariant: Vec<&Cocycle> = maps
            .iter()
            .filter(|phi| check_equivariance(&m, phi, true) && is_twisted_cocycle(&m, phi))
            .collect();
        let mut cocycles = 0;
        for phi in maps.iter().filter(|phi| is_twisted_cocycle(&m, phi)) {
            let rep = equivariant_representative(&m, phi)
                .map_err(|e| format!("{name} module, Φ = {:?}: {e}", phi.values))?;
            // Independent route: solve the coboundary relation against every equivariant cocycle.
            let mut matches = Vec::new();
            for g in &equivariant {
                if cohomologous(&m, phi, g)
                    .map_err(|e| e.to_string())?
                    .is_some()
                {
                    matches.push(*g);
                }
            }
            ensure(matches.len() == 1 && *matches[0] == rep, || {
                format!(
                    "{name} module, Φ = {:?}: {} equivariant cocycles cohomologous",
                    phi.values,
                    matches.len()
                )
            })?;
            cocycles += 1;
        }
        summary.push(format!(
            "{name}: {cocycles} cocycles, {} equivariant",
            equivariant.len()
        ));
    }
    Ok(summary.join("; "))
}

fn criterion_11() -> Outcome {
    let run = || {
        Command::new(env!("CARGO_BIN_EXE_cycleset"))
            .args(["classify", "pqr", "--p", "2", "--q", "3", "--r", "7"])
            .output()
            .map_err(|e| e.to_string())
    };
    let a = run()?;
    let b = run()?;
    ensure(!a.stdout.is_empty(), || {
        format!("empty output, exit {:?}", a.status.code())
    })?;
    ensure(
        a.stdout == b.stdout && a.status.code() == b.status.code(),
        || "outputs differ".into(),
    )?;
    Ok(format!(
        "{} bytes twice, exit code {:?}",
        a.stdout.len(),
        a.status.code()
    ))
}

fn main() -> ExitCode {
    let start = Instant::now();
    let corpus = corpus();
    let mut results: Vec<(usize, Outcome, Duration)> = Vec::new();
    let timed = |k: usize, f: &dyn Fn() -> Outcome| {
        let t = Instant::now();
        let out = f();
        (k, out, t.elapsed())
    };
    match &corpus {
        Ok(c) => {
            results.push(timed(1, &|| criterion_1(c)));
            results.push(timed(2, &criterion_2));
            results.push(timed(3, &criterion_3));
            results.push(timed(4, &criterion_4));
            results.push(timed(5, &|| criterion_5(c)));
            results.push(timed(6, &|| criterion_6(c)));
        }
        Err(e) => {
            for k in 1..=6 {
                results.push((k, Err(format!("corpus: {e}")), Duration::ZERO));
            }
        }
    }
    results.push(timed(7, &criterion_7));
    results.push(timed(8, &criterion_8));
    results.push(timed(9, &criterion_9));
    results.push(timed(10, &criterion_10));
    results.push(timed(11, &criterion_11));
    let mut failed = 0;
    for (k, out, t) in &results {
        match out {
            Ok(msg) => println!("criterion {k:>2}: PASS ({:.1}s) {msg}", t.as_secs_f64()),
            Err(msg) => {
                failed += 1;
                println!("criterion {k:>2}: FAIL ({:.1}s) {msg}", t.as_secs_f64());
            }
        }
    }
    println!(
        "{} of {} criteria passed in {:.1}s",
        results.len() - failed,
        results.len(),
        start.elapsed().as_secs_f64()
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
