//! The acceptance suite: one PASS/FAIL line per criterion, non-zero exit if
//! any fails. Runs as a plain binary so the lines always reach the terminal.

#[path = "../../core/tests/common/oracle.rs"]
mod oracle;

use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use rand::Rng;
use statrs::distribution::{ChiSquared, ContinuousCDF, Discrete, DiscreteCDF, Poisson};

use oracle::{naive_meb_radius, oracle_complex, threshold_fixtures};
use randtopo::complex::{build_complex, cech_complex, rips_complex, skeleton, wedge_sum};
use randtopo::complex::{Flavor, SimplicialComplex};
use randtopo::detection::connected_components;
use randtopo::experiment::{
    estimate_event_probabilities, isolation_scaling, percolation_probe, run_pendant_experiment,
    Realization,
};
use randtopo::fixtures::{
    doubly_attached_square, equilateral_triangle, seven_points, square, square_boundary,
};
use randtopo::genericity::{genericity_margin, make_generic, perturb};
use randtopo::geometry::{bottleneck_set_distance, hausdorff_distance, Cuboid, PointSet};
use randtopo::homology::{betti_numbers, euler_characteristic, Field};
use randtopo::poisson::{sample, PoissonConfig, SamplingMode};
use randtopo::seeds::stream;

type Outcome = Result<String, String>;
type Criterion = (&'static str, Duration, fn() -> Outcome);

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within_3_sigma(observed: f64, expected: f64, sigma: f64) -> bool {
    (observed - expected).abs() <= 3.0 * sigma
}

fn c1_seven_points() -> Outcome {
    let x = seven_points();
    let rips = rips_complex(&x, 2.4, 3).map_err(|e| e.to_string())?.complex;
    let cech = cech_complex(&x, 2.4, 3).map_err(|e| e.to_string())?.complex;
    ensure(skeleton(&rips, 1) == skeleton(&cech, 1), || {
        "1-skeletons differ".into()
    })?;
    let edges = rips.num_faces(1);
    // The drawing of this example has 12 edges; 12 is the count checked.
    ensure(edges == 12, || format!("{edges} edges, expected 12"))?;
    ensure(rips.contains(&[0, 1, 2]), || {
        "Rips lacks the triangle".into()
    })?;
    ensure(!cech.contains(&[0, 1, 2]), || {
        "Čech has the triangle".into()
    })?;
    let tri: Vec<&[f64]> = (0..3).map(|i| x.get(i)).collect();
    let r = naive_meb_radius(&tri);
    ensure(r == 1.25, || format!("enclosing radius {r}, expected 1.25"))?;
    let mine = randtopo::geometry::minimal_enclosing_ball(&x.select(&[0, 1, 2]))
        .map_err(|e| e.to_string())?;
    ensure(mine.radius == 1.25, || {
        format!("library radius {}", mine.radius)
    })?;
    Ok(format!("{edges} shared edges, triangle radius 1.25 > 1.2"))
}

fn c2_triangles() -> Outcome {
    let x = PointSet::new(2, &[[0.0, 0.0], [1.0, 0.0], [1.0, 1.0]]).map_err(|e| e.to_string())?;
    let y = PointSet::new(2, &[[-1.0, 1.0], [0.0, 1.0], [-1.0, 0.0]]).map_err(|e| e.to_string())?;
    let b = bottleneck_set_distance(&x, &y).map_err(|e| e.to_string())?;
    let h = hausdorff_distance(&x, &y).map_err(|e| e.to_string())?;
    ensure((b - 2.0).abs() <= 1e-9, || format!("bottleneck {b}"))?;
    ensure((h - 2f64.sqrt()).abs() <= 1e-9, || format!("hausdorff {h}"))?;
    Ok(format!("bottleneck {b}, hausdorff {h}"))
}

fn random_set(rng: &mut impl Rng, max_n: usize, dims: &[usize], span: f64) -> PointSet {
    let d = dims[rng.random_range(0..dims.len())];
    let n = rng.random_range(1..=max_n);
    let rows: Vec<Vec<f64>> = (0..n)
        .map(|_| (0..d).map(|_| rng.random_range(0.0..span)).collect())
        .collect();
    PointSet::with_duplicates(d, &rows).unwrap()
}

fn c3_sandwich() -> Outcome {
    let mut rng = stream(3, &[]);
    let mut violations = 0;
    for _ in 0..500 {
        let x = random_set(&mut rng, 25, &[2, 3], 2.0);
        let rho = rng.random_range(0.05..1.2);
        let cap = x.dim() + 1;
        let c1 = cech_complex(&x, rho, cap)
            .map_err(|e| e.to_string())?
            .complex;
        let r = rips_complex(&x, rho, cap)
            .map_err(|e| e.to_string())?
            .complex;
        let c2 = cech_complex(&x, 2.0 * rho, cap)
            .map_err(|e| e.to_string())?
            .complex;
        let ok = c1.all_faces().all(|f| r.contains(f))
            && r.all_faces().all(|f| c2.contains(f))
            && skeleton(&c1, 1) == skeleton(&r, 1);
        violations += (!ok) as u32;
    }
    ensure(violations == 0, || format!("{violations} violations"))?;
    Ok("500 sets, 0 violations".into())
}

fn c4_builder_oracle() -> Outcome {
    let mut rng = stream(4, &[]);
    let mut mismatches = 0;
    for _ in 0..1000 {
        let x = random_set(&mut rng, 8, &[1, 2, 3], 2.0);
        let rho = rng.random_range(0.1..2.5);
        let cap = x.len().saturating_sub(1).max(1);
        for flavor in [Flavor::Rips, Flavor::Cech] {
            let got = build_complex(&x, rho, cap, flavor)
                .map_err(|e| e.to_string())?
                .complex;
            if got != oracle_complex(&x, rho, cap, flavor) {
                mismatches += 1;
            }
        }
    }
    ensure(mismatches == 0, || format!("{mismatches} mismatches"))?;
    Ok("1000 instances, both flavors exact".into())
}

fn c5_homology() -> Outcome {
    let cycle = SimplicialComplex::from_faces(1, [[0, 1], [1, 2], [0, 2]]).unwrap();
    let filled = SimplicialComplex::from_faces(2, [[0, 1, 2]]).unwrap();
    let tet =
        SimplicialComplex::from_faces(2, [[0, 1, 2], [0, 1, 3], [0, 2, 3], [1, 2, 3]]).unwrap();
    let oct_points: Vec<[f64; 3]> = (0..6)
        .map(|i| {
            let mut p = [0.0; 3];
            p[i / 2] = if i % 2 == 0 { 1.0 } else { -1.0 };
            p
        })
        .collect();
    let oct = rips_complex(&PointSet::new(3, &oct_points).unwrap(), 1.9, 3)
        .map_err(|e| e.to_string())?
        .complex;
    let wedge = wedge_sum(&cycle, 0, &cycle, 0).map_err(|e| e.to_string())?;
    let cases: [(&str, &SimplicialComplex, &[usize]); 5] = [
        ("3-cycle", &cycle, &[1, 1]),
        ("filled triangle", &filled, &[1, 0]),
        ("tetrahedron boundary", &tet, &[1, 0, 1]),
        ("octahedron boundary", &oct, &[1, 0, 1]),
        ("wedge of two 3-cycles", &wedge, &[1, 2]),
    ];
    for (name, k, want) in cases {
        for field in [Field::Gf2, Field::Rational] {
            let b = betti_numbers(k, field).map_err(|e| e.to_string())?;
            ensure(b.matches(want), || {
                format!("{name} over {field:?}: {:?}", b.betti)
            })?;
        }
    }
    let mut rng = stream(5, &[]);
    for i in 0..200 {
        let faces: Vec<Vec<u32>> = (0..rng.random_range(1..15))
            .map(|_| {
                let mut f: Vec<u32> = (0..rng.random_range(1..=4))
                    .map(|_| rng.random_range(0..9))
                    .collect();
                f.sort_unstable();
                f.dedup();
                f
            })
            .collect();
        let k = SimplicialComplex::from_faces(3, faces).unwrap();
        let b = betti_numbers(&k, Field::Rational).map_err(|e| e.to_string())?;
        ensure(b.euler_characteristic() == euler_characteristic(&k), || {
            format!("random complex {i}")
        })?;
    }
    Ok("5 fixtures over GF2 and Q, 200 random Euler checks".into())
}

fn c6_genericity() -> Outcome {
    let mut rng = stream(6, &[]);
    let mut reps = 0;
    let mut attempt = 0u64;
    while reps < 100 {
        attempt += 1;
        let x = random_set(&mut rng, 7, &[1, 2, 3], 2.0);
        let rho = rng.random_range(0.3..2.0);
        let flavor = if attempt.is_multiple_of(2) {
            Flavor::Rips
        } else {
            Flavor::Cech
        };
        let m = genericity_margin(&x, rho, flavor);
        if !(m.is_finite() && m > 1e-6) {
            continue;
        }
        reps += 1;
        let cap = x.len().saturating_sub(1).max(1);
        let before = oracle_complex(&x, rho, cap, flavor);
        for _ in 0..100 {
            let y = perturb(&x, m / 2.0, &mut rng);
            if oracle_complex(&y, rho, cap, flavor) != before {
                return Err(format!(
                    "representation {reps} ({flavor:?}) changed under a perturbation below m/2"
                ));
            }
        }
    }
    let fixtures = threshold_fixtures();
    ensure(fixtures.len() >= 20, || {
        format!("only {} threshold fixtures", fixtures.len())
    })?;
    for (i, (x, flavor)) in fixtures.iter().take(20).enumerate() {
        let cap = x.len() - 1;
        let r = make_generic(x, 1.0, *flavor, false).map_err(|e| e.to_string())?;
        let m = genericity_margin(&r.points, 1.0, *flavor);
        ensure(m > 0.0, || {
            format!("fixture {i}: margin {m} after rescaling")
        })?;
        let same =
            oracle_complex(&r.points, 1.0, cap, *flavor) == oracle_complex(x, 1.0, cap, *flavor);
        ensure(same, || format!("fixture {i}: complex changed"))?;
    }
    Ok("100 x 100 perturbations stable, 20 threshold fixtures made generic".into())
}

const POISSON_TRIALS: u64 = 100_000;

fn poisson_counts(
    t: f64,
    window: &Cuboid,
    mode: SamplingMode,
    boxes: &[Cuboid],
) -> Result<Vec<Vec<u64>>, String> {
    use rayon::prelude::*;
    (0..POISSON_TRIALS)
        .into_par_iter()
        .map(|seed| {
            let cfg =
                PoissonConfig::new(t, window.clone(), seed, mode).map_err(|e| e.to_string())?;
            let x = sample(&cfg).map_err(|e| e.to_string())?;
            let mut v: Vec<u64> = boxes
                .iter()
                .map(|b| x.iter().filter(|p| b.contains(p)).count() as u64)
                .collect();
            v.push(x.len() as u64);
            Ok(v)
        })
        .collect()
}

fn mean_var(v: impl Iterator<Item = f64>) -> (f64, f64) {
    let v: Vec<f64> = v.collect();
    let n = v.len() as f64;
    let m = v.iter().sum::<f64>() / n;
    (
        m,
        v.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (n - 1.0),
    )
}

fn c7_poisson() -> Outcome {
    let t = 2.0;
    let window = Cuboid::new(vec![0.0, 0.0], vec![3.0, 2.0]).unwrap();
    let unit = Cuboid::new(vec![1.0, 0.0], vec![2.0, 1.0]).unwrap();
    let small = Cuboid::new(vec![0.0, 1.0], vec![0.5, 2.0]).unwrap();
    let n = POISSON_TRIALS as f64;
    let mut detail = Vec::new();
    let mut totals = Vec::new();
    for mode in [SamplingMode::Direct, SamplingMode::Cube] {
        let counts = poisson_counts(t, &window, mode, &[unit.clone(), small.clone()])?;
        for (i, b) in [&unit, &small].into_iter().enumerate() {
            let p = (-t * b.volume()).exp();
            let hat = counts.iter().filter(|c| c[i] == 0).count() as f64 / n;
            let sigma = (p * (1.0 - p) / n).sqrt();
            ensure(within_3_sigma(hat, p, sigma), || {
                format!("{mode} void box {i}: {hat} vs {p}")
            })?;
        }
        let law = Poisson::new(t).unwrap();
        let mut k = 0u64;
        while n * (1.0 - law.cdf(k)) >= 5.0 {
            k += 1;
        }
        let mut stat = 0.0;
        for bin in 0..=k {
            let obs = counts
                .iter()
                .filter(|c| if bin == k { c[0] >= k } else { c[0] == bin })
                .count() as f64;
            let p = if bin == k {
                1.0 - law.cdf(k - 1)
            } else {
                law.pmf(bin)
            };
            stat += (obs - n * p).powi(2) / (n * p);
        }
        let critical = ChiSquared::new(k as f64).unwrap().inverse_cdf(0.99);
        ensure(stat < critical, || {
            format!("{mode} unit cube chi-square {stat:.2} >= {critical:.2}")
        })?;
        detail.push(format!("{mode} chi2 {stat:.1}/{critical:.1}"));
        totals.push(mean_var(counts.iter().map(|c| c[2] as f64)));
    }
    let ((md, vd), (mc, vc)) = (totals[0], totals[1]);
    ensure(within_3_sigma(md, mc, ((vd + vc) / n).sqrt()), || {
        format!("means {md} vs {mc}")
    })?;
    let lambda = (md + mc) / 2.0;
    let sigma_var = (2.0 * (lambda + 2.0 * lambda * lambda) / n).sqrt();
    ensure(within_3_sigma(vd, vc, sigma_var), || {
        format!("variances {vd} vs {vc}")
    })?;
    detail.push(format!("mean {md:.4}/{mc:.4}, var {vd:.4}/{vc:.4}"));
    Ok(detail.join(", "))
}

fn triangle_realization() -> Result<Realization, String> {
    Realization::from_points(equilateral_triangle(0.5), 0.75, Flavor::Rips)
        .map_err(|e| e.to_string())
}

fn c8_events() -> Outcome {
    let real = triangle_realization()?;
    let r = estimate_event_probabilities(&real, 0.1, 1.0, 100_000, 8).map_err(|e| e.to_string())?;
    for name in ["A_hat matches c_A", "B_hat matches c_B"] {
        let c = r.check(name).ok_or(format!("missing check {name}"))?;
        ensure(c.passed, || format!("{name}: {}", c.detail))?;
    }
    Ok(format!(
        "A_hat {:.3e} vs c_A {:.3e}, B_hat {:.4} vs c_B {:.4}",
        r.frequencies["A_hat"].p,
        r.predictions["c_A"],
        r.frequencies["B_hat"].p,
        r.predictions["c_B"]
    ))
}

fn c9_isolation() -> Outcome {
    let real = triangle_realization()?;
    let side = 20.0 * 2f64.sqrt();
    let windows = [
        Cuboid::cube(2, 20.0).unwrap(),
        Cuboid::cube(2, side).unwrap(),
    ];
    let r = isolation_scaling(&real, 1.0, &windows, 2000, 9).map_err(|e| e.to_string())?;
    for k in 0..2 {
        let name = format!("window_{k}: per-cell mean at least c_A*c_B");
        let c = r.check(&name).ok_or(format!("missing check {name}"))?;
        ensure(c.passed, || format!("{name}: {}", c.detail))?;
    }
    let c = r
        .check("window_1: count scales with eroded volume")
        .ok_or("missing scaling check")?;
    ensure(c.passed, || c.detail.clone())?;
    let density = |k: usize| r.estimates[&format!("window_{k}.count_per_eroded_volume")].mean;
    Ok(format!(
        "per-cell mean {:.4} >= c_A*c_B {:.2e}; density {:.5} vs {:.5}",
        r.estimates["window_0.per_cell"].mean,
        r.predictions["window_0.c_A*c_B"],
        density(0),
        density(1)
    ))
}

fn c10_pendant() -> Outcome {
    let real = Realization::new(square_boundary(), square(0.8), 1.0, Flavor::Rips)
        .map_err(|e| e.to_string())?;
    let window = Cuboid::cube(2, 20.0).unwrap();
    let r =
        run_pendant_experiment(&real, 2.0, &window, 500, 10, true).map_err(|e| e.to_string())?;
    let found = &r.frequencies["planted_found"];
    ensure(found.count == 500, || {
        format!("planted copy found in {} of 500", found.count)
    })?;
    let v = r
        .check("pendant reports verified")
        .ok_or("missing verification check")?;
    ensure(v.passed, || v.detail.clone())?;
    let mut rng = stream(10, &[1]);
    let mut false_pendants = 0;
    for _ in 0..500 {
        let x = doubly_attached_square(1.0, &mut rng);
        let g = rips_complex(&x, 1.0, 2).map_err(|e| e.to_string())?;
        let dec = connected_components(&g);
        for host in 0..dec.len() {
            false_pendants += dec
                .pendant_occurrences(&g, &square_boundary(), host)
                .map_err(|e| e.to_string())?
                .len();
        }
    }
    ensure(false_pendants == 0, || {
        format!("{false_pendants} false pendants")
    })?;
    Ok("500/500 planted copies recovered, 0 false pendants in 500 bridge-free fixtures".into())
}

fn c11_percolation() -> Outcome {
    let ts = [0.4, 0.8, 1.2, 1.6, 2.0, 2.5, 3.0, 4.0];
    let curve = percolation_probe(1.0, 2, &ts, &[20.0], 200, 11).map_err(|e| e.to_string())?;
    let low = curve.fraction(0.4, 20.0).ok_or("no point at t = 0.4")?;
    let high = curve.fraction(4.0, 20.0).ok_or("no point at t = 4.0")?;
    ensure(low < 0.2, || format!("crossing fraction {low} at t = 0.4"))?;
    ensure(high > 0.8, || {
        format!("crossing fraction {high} at t = 4.0")
    })?;
    let smoothed: Vec<f64> = curve.points.iter().map(|p| p.smoothed).collect();
    ensure(smoothed.windows(2).all(|w| w[0] <= w[1]), || {
        format!("smoothed curve {smoothed:?}")
    })?;
    let t_hat = curve
        .t_hat
        .map_or("none".to_string(), |t| format!("{t:.3}"));
    Ok(format!("{low} at t=0.4, {high} at t=4.0, t_hat {t_hat}"))
}

fn randtopo(dir: &Path, args: &[&str]) -> Result<(), String> {
    let out = Command::new(env!("CARGO_BIN_EXE_randtopo"))
        .args(args)
        .current_dir(dir)
        .output()
        .map_err(|e| e.to_string())?;
    ensure(out.status.success(), || {
        format!(
            "randtopo {}: {}",
            args.join(" "),
            String::from_utf8_lossy(&out.stderr)
        )
    })
}

fn c12_determinism() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let d = dir.path();
    let write =
        |name: &str, text: &str| std::fs::write(d.join(name), text).map_err(|e| e.to_string());
    write(
        "poisson.toml",
        "intensity = 1.5\nwindow = [[0.0, 8.0], [0.0, 8.0]]\nseed = 1\nmode = \"CUBE\"\n",
    )?;
    write("tri.csv", "0,0\n0.5,0\n0.25,0.4330127018922193\n")?;
    let experiment = |kind: &str, extra: &str| {
        format!(
            "[process]\nintensity = 1.0\nwindow = [[0.0, 12.0], [0.0, 12.0]]\nseed = 3\n\n[complex]\nrho = 0.75\n\n\
             [target]\npoints = [[0.0, 0.0], [0.5, 0.0], [0.25, 0.4330127018922193]]\n\n\
             [experiment]\nkind = \"{kind}\"\ntrials = 40\n{extra}"
        )
    };
    write("events.toml", &experiment("events", ""))?;
    write(
        "isolation.toml",
        &experiment("isolation", "windows = [[[0.0, 15.0], [0.0, 15.0]]]\n"),
    )?;
    write("pendant.toml", &experiment("pendant", ""))?;
    write(
        "perc.toml",
        "[complex]\nrho = 1.0\n[experiment]\nkind = \"percolation\"\ntrials = 20\nt_values = [0.5, 2.0, 4.0]\nwindow_sides = [6.0, 10.0]\n",
    )?;

    // Inputs for the commands that read earlier outputs.
    randtopo(
        d,
        &[
            "sample",
            "--config",
            "poisson.toml",
            "--seed",
            "7",
            "-o",
            "pts.csv",
        ],
    )?;
    randtopo(
        d,
        &[
            "sample",
            "--config",
            "poisson.toml",
            "--seed",
            "8",
            "-o",
            "pts2.csv",
        ],
    )?;
    randtopo(
        d,
        &[
            "build",
            "--points",
            "tri.csv",
            "--rho",
            "0.75",
            "-o",
            "target.json",
        ],
    )?;
    randtopo(
        d,
        &[
            "build", "--points", "pts.csv", "--rho", "1", "--flavor", "CECH", "-o", "cx.json",
        ],
    )?;

    let runs: Vec<Vec<&str>> = vec![
        vec!["sample", "--config", "poisson.toml", "--seed", "7"],
        vec![
            "sample",
            "--config",
            "poisson.toml",
            "--seed",
            "7",
            "--mode",
            "DIRECT",
        ],
        vec![
            "build", "--points", "pts.csv", "--rho", "1", "--flavor", "CECH",
        ],
        vec!["build", "--points", "pts.csv", "--rho", "1.2"],
        vec!["betti", "--complex", "cx.json", "--field", "RATIONAL"],
        vec!["dist", "pts.csv", "pts2.csv"],
        vec![
            "generic", "--points", "tri.csv", "--rho", "0.75", "--trials", "50", "--seed", "4",
        ],
        vec![
            "detect",
            "--points",
            "pts.csv",
            "--rho",
            "0.75",
            "--target",
            "target.json",
        ],
        vec![
            "detect",
            "--points",
            "pts.csv",
            "--rho",
            "1",
            "--target",
            "target.json",
            "--kind",
            "pendant",
        ],
        vec!["experiment", "--config", "events.toml", "--seed", "5"],
        vec!["experiment", "--config", "isolation.toml", "--seed", "5"],
        vec!["experiment", "--config", "pendant.toml", "--seed", "5"],
        vec!["percolation", "--config", "perc.toml", "--seed", "5"],
    ];
    for (i, args) in runs.iter().enumerate() {
        let mut outputs = Vec::new();
        for (rep, threads) in ["1", "4", "4"].iter().enumerate() {
            let name = format!("out_{i}_{rep}");
            let mut full: Vec<&str> = vec!["--threads", threads];
            full.extend(args);
            full.extend(["-o", &name]);
            randtopo(d, &full)?;
            outputs.push(std::fs::read(d.join(&name)).map_err(|e| e.to_string())?);
        }
        ensure(outputs.iter().all(|o| *o == outputs[0]), || {
            format!("`randtopo {}` differs between runs", args.join(" "))
        })?;
        ensure(!outputs[0].is_empty(), || {
            format!("`randtopo {}` wrote nothing", args.join(" "))
        })?;
    }
    Ok(format!(
        "{} invocations byte-identical across 3 runs (1 and 4 threads)",
        runs.len()
    ))
}

fn main() {
    let criteria: [Criterion; 12] = [
        (
            "seven-point Rips/Čech example",
            Duration::from_secs(1),
            c1_seven_points,
        ),
        (
            "bottleneck and Hausdorff triangles",
            Duration::from_secs(1),
            c2_triangles,
        ),
        ("Čech/Rips sandwich", Duration::from_secs(60), c3_sandwich),
        (
            "builders match all-subsets oracle",
            Duration::from_secs(60),
            c4_builder_oracle,
        ),
        (
            "homology fixtures and Euler-Poincaré",
            Duration::from_secs(60),
            c5_homology,
        ),
        (
            "genericity stability and make_generic",
            Duration::from_secs(120),
            c6_genericity,
        ),
        ("Poisson laws", Duration::from_secs(120), c7_poisson),
        (
            "local event closed forms",
            Duration::from_secs(300),
            c8_events,
        ),
        (
            "isolation per cell and scaling",
            Duration::from_secs(600),
            c9_isolation,
        ),
        ("pendant detection", Duration::from_secs(120), c10_pendant),
        (
            "percolation probe",
            Duration::from_secs(600),
            c11_percolation,
        ),
        ("CLI determinism", Duration::from_secs(600), c12_determinism),
    ];
    let mut failed = 0;
    for (i, (name, limit, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = run();
        let elapsed = start.elapsed();
        let outcome = match outcome {
            Ok(detail) if elapsed > *limit => {
                Err(format!("{detail}; took {elapsed:.2?}, limit {limit:?}"))
            }
            other => other,
        };
        match outcome {
            Ok(detail) => println!("PASS {:>2} {name} ({elapsed:.2?}): {detail}", i + 1),
            Err(detail) => {
                failed += 1;
                println!("FAIL {:>2} {name} ({elapsed:.2?}): {detail}", i + 1);
            }
        }
    }
    println!(
        "acceptance: {} passed, {failed} failed",
        criteria.len() - failed
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
