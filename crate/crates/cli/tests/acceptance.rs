//! Acceptance criteria. Runs without the libtest harness so that one
//! PASS/FAIL line per criterion is always printed; exits non-zero if any
//! criterion fails.

use std::io::Write;
use std::panic::{self, AssertUnwindSafe};
use std::path::PathBuf;
use std::process::{Command, Output};
use std::time::Instant;

use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use wr0_cli::{run, Cli};
use wr0_core::cone::extreme_rays;
use wr0_core::model::{dynamically_equivalent, parse_system, PolySystem, Vertex, WeightedEGraph};
use wr0_core::random::{random_weight, random_weighted_graph, random_wr0_graph, Wr0GraphSpec};
use wr0_core::ratmat::{RatMatrix, Rational};
use wr0_core::sim::{certify, lyapunov_value};
use wr0_core::steady::{complex_balance_residual, steady_states};
use wr0_core::wr0::find_wr0;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

macro_rules! ensure {
    ($cond:expr, $($fmt:tt)+) => {
        let ok: bool = $cond;
        if !ok {
            return Err(format!($($fmt)+));
        }
    };
}

fn data(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("tests/data")
        .join(name)
        .to_str()
        .unwrap()
        .to_string()
}

fn wr0(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_wr0"))
        .args(args)
        .output()
        .unwrap()
}

fn load(name: &str) -> PolySystem {
    parse_system(&std::fs::read_to_string(data(name)).unwrap())
        .unwrap()
        .system
}

fn rat(n: i64) -> Rational {
    Rational::from_integer(n.into())
}

fn v(e: &[u32]) -> Vertex {
    Vertex::new(e.to_vec())
}

fn graph(edges: &[(&[u32], &[u32], i64)]) -> WeightedEGraph {
    WeightedEGraph::new(2, edges.iter().map(|&(a, b, k)| (v(a), v(b), rat(k)))).unwrap()
}

fn inf_norm(x: &[f64]) -> f64 {
    x.iter().fold(0.0, |m, v| m.max(v.abs()))
}

fn golden_triangle() -> Outcome {
    let cli =
        <Cli as clap::Parser>::try_parse_from(["wr0", "realize", &data("triangle.txt")]).unwrap();
    let mut out = Vec::new();
    let mut err = Vec::new();
    let start = Instant::now();
    let code = run(&cli, &mut out, &mut err);
    let elapsed = start.elapsed().as_secs_f64();
    ensure!(code == 0, "exit code {code}");
    let value: Value = serde_json::from_slice(&out).map_err(|e| e.to_string())?;

    // Graph indices of y1 = x1, y2 = x2^2, y3 = x3^2.
    let vertices = value["vertices"].as_array().unwrap();
    let index = |y: Value| vertices.iter().position(|v| *v == y).unwrap();
    let (y1, y2, y3) = (
        index(json!([1, 0, 0])),
        index(json!([0, 2, 0])),
        index(json!([0, 0, 2])),
    );
    let mut expected: Vec<Value> = [
        (y1, y2, "7"),
        (y1, y3, "5"),
        (y2, y3, "2"),
        (y3, y1, "1"),
        (y3, y2, "4"),
    ]
    .iter()
    .map(|&(f, t, k)| json!({"from": f, "to": t, "kappa": k}))
    .collect();
    let mut edges = value["edges"].as_array().unwrap().clone();
    let key = |e: &Value| (e["from"].as_u64(), e["to"].as_u64());
    expected.sort_by_key(key);
    edges.sort_by_key(key);
    ensure!(edges == expected, "edges {edges:?}");
    ensure!(
        value["components"] == json!([[0, 1, 2]]),
        "components {}",
        value["components"]
    );
    ensure!(
        value["deficiency"] == 0,
        "deficiency {}",
        value["deficiency"]
    );
    ensure!(elapsed < 0.1, "took {elapsed:.3} s");
    Ok(format!(
        "five edges exact, one component, deficiency 0, {:.1} ms",
        elapsed * 1e3
    ))
}

fn golden_outside_cone() -> Outcome {
    let out = wr0(&["realize", &data("outside_cone.txt")]);
    ensure!(
        out.status.code() == Some(2),
        "exit code {:?}",
        out.status.code()
    );
    let value: Value = serde_json::from_slice(&out.stdout).map_err(|e| e.to_string())?;
    ensure!(value["reason"] == "NotInCone", "reason {}", value["reason"]);
    // The first monomial in our order is x1, the first source.
    ensure!(
        value["detail"]["source_index"] == 0,
        "source {}",
        value["detail"]["source_index"]
    );
    ensure!(
        value["detail"]["monomial"] == json!([1, 0, 0]),
        "monomial {}",
        value["detail"]["monomial"]
    );
    ensure!(
        value["detail"]["rays"] == json!([["2", "1", "1"]]),
        "rays {}",
        value["detail"]["rays"]
    );

    let rays = extreme_rays(&load("outside_cone.txt").net_matrix());
    let expected: Vec<Vec<BigInt>> = vec![vec![2.into(), 1.into(), 1.into()]];
    ensure!(
        rays.rays() == expected.as_slice(),
        "library rays {:?}",
        rays.rays()
    );
    Ok("exit 2, NotInCone at source x1, ray (2,1,1)".into())
}

fn golden_planar() -> Outcome {
    let pairs = graph(&[
        (&[0, 0], &[2, 2], 3),
        (&[2, 2], &[0, 0], 2),
        (&[0, 2], &[2, 0], 3),
        (&[2, 0], &[0, 2], 5),
    ]);
    let square = graph(&[
        (&[0, 0], &[2, 0], 3),
        (&[2, 0], &[0, 0], 5),
        (&[0, 2], &[2, 2], 3),
        (&[2, 2], &[0, 2], 1),
        (&[0, 0], &[0, 2], 3),
        (&[0, 2], &[0, 0], 3),
        (&[2, 0], &[2, 2], 5),
        (&[2, 2], &[2, 0], 1),
        (&[2, 2], &[0, 0], 1),
    ]);
    let star = graph(&[
        (&[0, 0], &[1, 1], 6),
        (&[2, 0], &[1, 1], 10),
        (&[0, 2], &[1, 1], 6),
        (&[2, 2], &[1, 1], 4),
    ]);
    let sys = load("planar.txt");

    let out = wr0(&["realize", &data("planar.txt")]);
    ensure!(
        out.status.code() == Some(0),
        "exit code {:?}",
        out.status.code()
    );
    let value: Value = serde_json::from_slice(&out.stdout).map_err(|e| e.to_string())?;
    ensure!(
        value["components"].as_array().unwrap().len() == 2,
        "components {}",
        value["components"]
    );
    let realized = find_wr0(&sys).map_err(|e| e.to_string())?;
    ensure!(realized.graph == pairs, "realization {:?}", realized.graph);
    let cli_edges: Vec<(usize, usize, String)> = value["edges"]
        .as_array()
        .unwrap()
        .iter()
        .map(|e| {
            (
                e["from"].as_u64().unwrap() as usize,
                e["to"].as_u64().unwrap() as usize,
                e["kappa"].as_str().unwrap().to_string(),
            )
        })
        .collect();
    let lib_edges: Vec<(usize, usize, String)> = pairs
        .edges()
        .iter()
        .map(|e| (e.from, e.to, e.kappa.to_string()))
        .collect();
    ensure!(cli_edges == lib_edges, "cli edges {cli_edges:?}");

    let graphs = [&pairs, &square, &star];
    for g in graphs {
        ensure!(g.associated_system() == sys, "associated system differs");
        for h in graphs {
            ensure!(dynamically_equivalent(g, h), "graphs not equivalent");
        }
    }
    Ok("two reversible pairs with weights 3,2,5,3; three graphs equivalent".into())
}

fn steady_state_check() -> Outcome {
    let sys = load("triangle.txt");
    let r = find_wr0(&sys).map_err(|e| e.to_string())?;
    let x = [3.0, 330f64.sqrt() / 2.0, 6.0];
    let f = inf_norm(&sys.eval(&x));
    let cb = inf_norm(&complex_balance_residual(&r, &x));
    ensure!(f < 1e-9, "|f| = {f:e}");
    ensure!(cb < 1e-9, "complex balance residual {cb:e}");

    let param = steady_states(&r).map_err(|e| e.to_string())?;
    ensure!(
        param.kernel == vec![vec![rat(2), rat(1), rat(1)]],
        "kernel {:?}",
        param.kernel
    );
    let mut worst: f64 = 0.0;
    for t in [-1.0, 0.0, 1.0] {
        let p = param.point(&[t]);
        worst = worst.max(inf_norm(&sys.eval(&p)));
    }
    ensure!(worst < 1e-9, "sampled |f| = {worst:e}");
    Ok(format!(
        "|f(x*)| = {f:.1e}, balance {cb:.1e}, samples {worst:.1e}"
    ))
}

/// Terminal classes from the transitive closure of the edge relation.
fn closure_terminal_classes(g: &WeightedEGraph) -> Vec<Vec<usize>> {
    let m = g.vertices().len();
    let mut reach = vec![vec![false; m]; m];
    for (i, row) in reach.iter_mut().enumerate() {
        row[i] = true;
    }
    for e in g.edges() {
        reach[e.from][e.to] = true;
    }
    for k in 0..m {
        for i in 0..m {
            for j in 0..m {
                if reach[i][k] && reach[k][j] {
                    reach[i][j] = true;
                }
            }
        }
    }
    (0..m)
        .filter(|&i| (0..m).all(|j| !reach[i][j] || reach[j][i]))
        .map(|i| {
            (0..m)
                .filter(|&j| reach[i][j] && reach[j][i])
                .collect::<Vec<_>>()
        })
        .filter(|class| !class.is_empty())
        .fold(Vec::new(), |mut acc, class| {
            if !acc.contains(&class) {
                acc.push(class);
            }
            acc
        })
}

fn deficiency_suite() -> Outcome {
    let pairs = graph(&[
        (&[0, 0], &[2, 2], 3),
        (&[2, 2], &[0, 0], 2),
        (&[0, 2], &[2, 0], 3),
        (&[2, 0], &[0, 2], 5),
    ]);
    let square = graph(&[
        (&[0, 0], &[2, 0], 3),
        (&[2, 0], &[0, 0], 5),
        (&[0, 2], &[2, 2], 3),
        (&[2, 2], &[0, 2], 1),
        (&[0, 0], &[0, 2], 3),
        (&[0, 2], &[0, 0], 3),
        (&[2, 0], &[2, 2], 5),
        (&[2, 2], &[2, 0], 1),
        (&[2, 2], &[0, 0], 1),
    ]);
    ensure!(
        pairs.deficiency().total == 0,
        "pairs deficiency {}",
        pairs.deficiency().total
    );
    ensure!(
        square.deficiency().total == 1,
        "square deficiency {}",
        square.deficiency().total
    );

    let labelled: [[u32; 2]; 8] = [
        [0, 2],
        [2, 3],
        [4, 0],
        [4, 2],
        [0, 0],
        [1, 0],
        [2, 1],
        [3, 1],
    ];
    let arcs = [
        (1, 2),
        (2, 1),
        (3, 4),
        (4, 3),
        (5, 6),
        (6, 7),
        (7, 5),
        (8, 7),
        (8, 4),
    ];
    let two_parts = WeightedEGraph::new(
        2,
        arcs.iter()
            .map(|&(a, b): &(usize, usize)| (v(&labelled[a - 1]), v(&labelled[b - 1]), rat(1))),
    )
    .unwrap();
    ensure!(two_parts.connected_components().len() == 2, "components");
    ensure!(
        two_parts.terminal_sccs().len() == 3,
        "terminal classes {:?}",
        two_parts.terminal_sccs()
    );

    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0005);
    for trial in 0..100 {
        let g = random_weighted_graph(&mut rng, 8, 100);
        let classes = closure_terminal_classes(&g);
        let kernel = g
            .kirchhoff_kernel()
            .map_err(|e| format!("graph {trial}: {e}"))?;
        ensure!(
            kernel.len() == classes.len(),
            "graph {trial}: {} vectors for {} classes",
            kernel.len(),
            classes.len()
        );
        let a = g.kirchhoff_matrix();
        ensure!(
            a.cols() - a.rank() == classes.len(),
            "graph {trial}: nullity"
        );
        for c in &kernel {
            let support: Vec<usize> = (0..c.len()).filter(|&i| !c[i].is_zero()).collect();
            ensure!(
                classes.contains(&support),
                "graph {trial}: support {support:?}"
            );
            ensure!(
                c.iter().all(|x| !x.is_negative()),
                "graph {trial}: negative entry"
            );
            ensure!(
                a.mul_vec(c).iter().all(Zero::is_zero),
                "graph {trial}: not in kernel"
            );
        }
    }
    Ok("deficiencies 0 and 1, 2 components with 3 terminal classes, 100 random kernels".into())
}

fn round_trip() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0006);
    let spec = Wr0GraphSpec::default();
    let start = Instant::now();
    let mut edges = 0;
    for trial in 0..200 {
        let g = random_wr0_graph(&mut rng, &spec);
        ensure!(
            g.dim() <= 5 && g.connected_components().len() <= 3,
            "graph {trial} out of range"
        );
        let r = find_wr0(&g.associated_system()).map_err(|e| format!("graph {trial}: {e}"))?;
        ensure!(r.graph == g, "graph {trial} differs after round trip");
        edges += g.edges().len();
    }
    let elapsed = start.elapsed().as_secs_f64();
    ensure!(elapsed < 30.0, "took {elapsed:.1} s");
    Ok(format!(
        "200 graphs ({edges} edges) recovered exactly in {elapsed:.2} s"
    ))
}

/// Extreme rays by support enumeration: `T` carries an extreme ray iff
/// `ker W_T` is one-dimensional and spanned by a strictly positive vector.
fn brute_force_rays(w: &RatMatrix) -> Vec<Vec<BigInt>> {
    use num_integer::Integer;
    let m = w.cols();
    let mut rays = Vec::new();
    for mask in 1u32..(1 << m) {
        let cols: Vec<usize> = (0..m).filter(|i| mask & (1 << i) != 0).collect();
        let kernel = w.select_columns(&cols).kernel_basis();
        let [k] = kernel.as_slice() else { continue };
        if !(k.iter().all(Signed::is_positive) || k.iter().all(Signed::is_negative)) {
            continue;
        }
        let lcm = k.iter().fold(BigInt::from(1), |acc, x| acc.lcm(x.denom()));
        let ints: Vec<BigInt> = k.iter().map(|x| (x.abs() * &lcm).to_integer()).collect();
        let g = ints.iter().fold(BigInt::zero(), |acc, x| acc.gcd(x));
        let mut full = vec![BigInt::zero(); m];
        for (&c, x) in cols.iter().zip(ints) {
            full[c] = x / &g;
        }
        rays.push(full);
    }
    rays.sort();
    rays
}

fn cone_oracle() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0007);
    let (mut total_rays, mut nontrivial) = (0, 0);
    for trial in 0..500 {
        let m = rng.gen_range(1..=6);
        let n = rng.gen_range(1..=m.min(4));
        let rows: Vec<Vec<Rational>> = (0..n)
            .map(|_| {
                (0..m)
                    .map(|_| {
                        let num: i64 = rng.gen_range(-5..=5);
                        let den: i64 = if rng.gen_bool(0.25) {
                            rng.gen_range(1..=4)
                        } else {
                            1
                        };
                        Rational::new(num.into(), den.into())
                    })
                    .collect()
            })
            .collect();
        let w = RatMatrix::from_rows(m, &rows);
        let expected = brute_force_rays(&w);
        let got = extreme_rays(&w);
        ensure!(
            got.rays() == expected.as_slice(),
            "matrix {trial}: {:?} vs {:?}",
            got.rays(),
            expected
        );
        total_rays += expected.len();
        nontrivial += usize::from(!expected.is_empty());
    }
    Ok(format!(
        "500 matrices, {nontrivial} with a nonzero cone, {total_rays} rays, all equal"
    ))
}

fn scaling() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0008);
    let spec = Wr0GraphSpec::default();
    for trial in 0..100 {
        let g = random_wr0_graph(&mut rng, &spec);
        let sys = g.associated_system();
        let base = find_wr0(&sys).map_err(|e| format!("system {trial}: {e}"))?;
        let a: Vec<Rational> = (0..sys.len())
            .map(|_| random_weight(&mut rng, 100))
            .collect();
        let scaled =
            find_wr0(&sys.scaled(&a)).map_err(|e| format!("scaled system {trial}: {e}"))?;
        ensure!(
            scaled.graph.edges().len() == base.graph.edges().len(),
            "system {trial}: edge count"
        );
        for (e, f) in base.graph.edges().iter().zip(scaled.graph.edges()) {
            ensure!(
                e.from == f.from && e.to == f.to,
                "system {trial}: edge set changed"
            );
            ensure!(
                f.kappa == &e.kappa * &a[e.from],
                "system {trial}: weight not scaled"
            );
        }
    }
    Ok("100 systems, weights scale exactly by a_i".into())
}

fn dynamics() -> Outcome {
    let sys = load("triangle.txt");
    let r = find_wr0(&sys).map_err(|e| e.to_string())?;
    let first = certify(&sys, &r, &[1.0, 1.0, 1.0], 20.0).map_err(|e| e.to_string())?;
    let x_star = &first.report.x_star;

    let l0 = lyapunov_value(&[1.0, 1.0, 1.0], x_star);
    let slack = 1e-8 * l0.abs();
    let increase = first
        .lyapunov
        .windows(2)
        .map(|w| w[1] - w[0])
        .fold(f64::NEG_INFINITY, f64::max);
    ensure!(increase <= slack, "L rose by {increase:e}");
    let drift = first
        .trajectory
        .states
        .iter()
        .map(|x| (2.0 * x[0] + x[1] + x[2] - 4.0).abs())
        .fold(0.0, f64::max);
    ensure!(drift < 1e-6, "conservation drift {drift:e}");
    // x* is the steady state of the polyhedron: balanced and on 2x1+x2+x3 = 4.
    ensure!(inf_norm(&sys.eval(x_star)) < 1e-9, "x* is not stationary");
    ensure!(
        (2.0 * x_star[0] + x_star[1] + x_star[2] - 4.0).abs() < 1e-12,
        "x* off the polyhedron"
    );
    let distance = first.report.terminal_distance;
    ensure!(distance < 1e-4, "terminal distance {distance:e}");

    let second = certify(&sys, &r, &[0.5, 2.5, 0.5], 20.0).map_err(|e| e.to_string())?;
    let gap = first
        .report
        .terminal_state
        .iter()
        .zip(&second.report.terminal_state)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    ensure!(gap < 1e-4, "terminal states differ by {gap:e}");
    Ok(format!(
        "L monotone, drift {drift:.1e}, terminal distance {distance:.1e}, gap {gap:.1e}"
    ))
}

fn consistency() -> Outcome {
    let mut verdicts = Vec::new();
    for (name, expected) in [
        ("inconsistent.txt", false),
        ("triangle.txt", true),
        ("outside_cone.txt", true),
    ] {
        let out = wr0(&["check", &data(name)]);
        ensure!(
            out.status.code() == Some(0),
            "{name}: exit code {:?}",
            out.status.code()
        );
        let value: Value = serde_json::from_slice(&out.stdout).map_err(|e| e.to_string())?;
        ensure!(
            value["consistent"] == expected,
            "{name}: consistent = {}",
            value["consistent"]
        );
        verdicts.push(format!("{name}={expected}"));
    }
    Ok(verdicts.join(", "))
}

fn main() {
    let criteria: [Criterion; 10] = [
        ("golden realization of the triangle system", golden_triangle),
        ("golden failure outside the cone", golden_outside_cone),
        (
            "golden planar realization and equivalent graphs",
            golden_planar,
        ),
        ("steady-state parametrization", steady_state_check),
        ("deficiency and terminal classes", deficiency_suite),
        ("round trip of random WR0 graphs", round_trip),
        ("cone generators against support enumeration", cone_oracle),
        ("scaling of coefficients", scaling),
        ("dynamics certification", dynamics),
        ("consistency check", consistency),
    ];
    panic::set_hook(Box::new(|_| {}));
    let mut failures = 0;
    let mut stdout = std::io::stdout().lock();
    for (i, (name, check)) in criteria.iter().enumerate() {
        let outcome = panic::catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|p| {
            let msg = p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            Err(format!("panicked: {msg}"))
        });
        let (status, detail) = match outcome {
            Ok(d) => ("PASS", d),
            Err(d) => {
                failures += 1;
                ("FAIL", d)
            }
        };
        let _ = writeln!(stdout, "criterion {:>2} {status}: {name} ({detail})", i + 1);
    }
    let _ = writeln!(
        stdout,
        "{} of {} criteria passed",
        criteria.len() - failures,
        criteria.len()
    );
    if failures > 0 {
        std::process::exit(1);
    }
}
