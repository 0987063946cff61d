//! Acceptance criteria, one PASS/FAIL line each. Exits non-zero if any fail.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use dktwist::algebra::{cartan_generators, HalfInt};
use dktwist::coassoc::{self, cg_oracle, racah_oracle, signed_permutation_residual};
use dktwist::linops::{self, DenseMatrix};
use dktwist::rmatrices::{self, coproduct_cartan};
use dktwist::twist::{closed_basis, crystal_basis, f_interval};
use dktwist::verify::{self, Check, VerificationReport};
use dktwist::{QParam, SeriesSpec};

const SPECS: [&str; 8] = ["A1", "A2", "A3", "B1", "B2", "C2", "D2", "D3"];

type Criterion = (&'static str, fn() -> Outcome);

struct Outcome {
    pass: bool,
    detail: String,
}

fn spec(s: &str) -> SeriesSpec {
    s.parse().expect("valid spec")
}

fn q(v: f64) -> QParam {
    QParam::new(v).expect("valid q")
}

fn within(worst: f64, tol: f64, what: &str) -> Outcome {
    Outcome {
        pass: worst <= tol,
        detail: format!("{what}: residual {worst:.2e} (tol {tol:.0e})"),
    }
}

fn timed(budget: Duration, f: impl FnOnce() -> Outcome) -> Outcome {
    let start = Instant::now();
    let mut o = f();
    let elapsed = start.elapsed();
    o.detail.push_str(&format!(", {:.3} s (limit {} s)", elapsed.as_secs_f64(), budget.as_secs()));
    o.pass &= elapsed < budget;
    o
}

fn off_diagonal(m: &DenseMatrix) -> f64 {
    let mut worst: f64 = 0.0;
    for r in 0..m.nrows() {
        for c in 0..m.ncols() {
            if r != c {
                worst = worst.max(m[(r, c)].abs());
            }
        }
    }
    worst
}

fn rotation(c: f64, s: f64) -> DenseMatrix {
    DenseMatrix::from_row_slice(4, 4, &[1.0, 0.0, 0.0, 0.0, 0.0, c, s, 0.0, 0.0, -s, c, 0.0, 0.0, 0.0, 0.0, 1.0])
}

const GRID: [f64; 4] = [0.1, 0.5, 2.0, 10.0];

fn criterion_1() -> Outcome {
    timed(Duration::from_secs(1), || {
        let mut worst: f64 = 0.0;
        for qv in GRID {
            let f = f_interval(&spec("A1"), q(qv), QParam::ONE).unwrap().matrix;
            let d = (2.0 * (qv + 1.0 / qv)).sqrt();
            let expect = rotation((qv.sqrt() + 1.0 / qv.sqrt()) / d, (qv.sqrt() - 1.0 / qv.sqrt()) / d);
            worst = worst.max(linops::residual(&f, &expect).unwrap());
        }
        within(worst, 1e-12, "A1 F[q1] against the closed rotation")
    })
}

fn criterion_2() -> Outcome {
    let a1 = spec("A1");
    let mut entries: f64 = 0.0;
    let mut chain: f64 = 0.0;
    for qv in GRID {
        let phi = qv.atan();
        let f = f_interval(&a1, q(qv), QParam::ZERO).unwrap();
        entries = entries.max(linops::residual(&f.matrix, &rotation(phi.cos(), phi.sin())).unwrap());
        chain = chain.max(verify::check_composition(&a1, QParam::ONE, QParam::ZERO, q(qv)).unwrap());
    }
    let a = within(entries, 1e-12, "A1 F[q0] against cos/sin of atan q");
    let b = within(chain, 1e-12, "F[q0]F[01] - F[q1]");
    Outcome {
        pass: a.pass && b.pass,
        detail: format!("{}; {}", a.detail, b.detail),
    }
}

fn criterion_3() -> Outcome {
    timed(Duration::from_secs(10), || {
        let mut worst: f64 = 0.0;
        for s in SPECS {
            for qv in [0.0, 0.01, 0.5, 1.0, 3.0] {
                let f = f_interval(&spec(s), QParam::new(qv).unwrap(), QParam::ONE).unwrap();
                worst = worst.max(verify::check_orthogonality(&f.matrix));
            }
        }
        within(worst, 1e-10, "orthogonality over 8 specs x 5 q")
    })
}

fn criterion_4() -> Outcome {
    let mut worst: f64 = 0.0;
    for s in SPECS {
        for qv in [0.5, 2.0] {
            worst = worst.max(verify::check_twist_r(&spec(s), q(qv)).unwrap());
        }
    }
    within(worst, 1e-10, "twist relation F21 Q^(1/2) F12^-1 = Rbar")
}

fn criterion_5() -> Outcome {
    let mut worst: f64 = 0.0;
    for s in SPECS {
        for qv in [0.01, 0.5, 2.0, 3.0] {
            let sp = spec(s);
            let f = f_interval(&sp, q(qv), QParam::ONE).unwrap().matrix;
            worst = worst.max(verify::check_intertwine(&f, &sp, q(qv)).unwrap());
        }
    }
    within(worst, 1e-9, "projector intertwining")
}

fn criterion_6() -> Outcome {
    let mut table: f64 = 0.0;
    let mut limit: f64 = 0.0;
    let mut worst_spec = "";
    for s in ["A2", "B1", "C2", "D2"] {
        let sp = spec(s);
        table = table.max(verify::check_crystal(&sp).unwrap());
        let near = closed_basis(&sp, q(1e-6)).unwrap();
        let crystal = crystal_basis(&sp).unwrap();
        for (label, v) in near.labels.iter().zip(&near.vectors) {
            let c = crystal.vector(label).unwrap();
            let d = (v - c).amax().min((v + c).amax());
            if d > limit {
                limit = d;
                worst_spec = s;
            }
        }
    }
    let a = within(table, 0.0, "crystal table");
    let b = within(limit, 1e-5, &format!("closed forms at q=1e-6 vs crystal (worst {worst_spec})"));
    Outcome {
        pass: a.pass && b.pass,
        detail: format!("{}; {}", a.detail, b.detail),
    }
}

fn criterion_7() -> Outcome {
    let mut diag: f64 = 0.0;
    let mut literal: f64 = 0.0;
    for s in ["A1", "A2", "B1"] {
        let sp = spec(s);
        let f = f_interval(&sp, QParam::ZERO, QParam::ONE).unwrap().matrix;
        let tau = rmatrices::exponent_model(&sp).unwrap().tau();
        diag = diag.max(off_diagonal(&(&f * &tau * f.transpose())));
        literal = literal.max(off_diagonal(&(f.transpose() * &tau * &f)));
    }
    // columns of F[10] = F[01]^T are the q = 1 vectors of the crystal states
    let f10 = f_interval(&spec("A1"), QParam::ONE, QParam::ZERO).unwrap().matrix;
    let half = HalfInt::from_twice(1);
    let cg = cg_oracle(half, half);
    let mut cg_worst: f64 = 0.0;
    let mut used = vec![false; cg.states.len()];
    for c in 0..4 {
        let col = f10.column(c).clone_owned();
        let (k, d) = cg
            .states
            .iter()
            .enumerate()
            .map(|(k, (_, v))| (k, (&col - v).amax().min((&col + v).amax())))
            .min_by(|a, b| a.1.total_cmp(&b.1))
            .unwrap();
        cg_worst = cg_worst.max(if used[k] { f64::INFINITY } else { d });
        used[k] = true;
    }
    let a = within(diag, 1e-10, "F[01] tau F[01]^T off-diagonal, A1 A2 B1");
    let b = within(cg_worst, 1e-10, "A1 columns of F[10] vs Clebsch-Gordan");
    Outcome {
        pass: a.pass && b.pass,
        detail: format!("{}; {}; transposed form F^T tau F off-diagonal {literal:.2e}", a.detail, b.detail),
    }
}

fn criterion_8() -> Outcome {
    let mut worst: f64 = 0.0;
    for s in ["A1", "A2"] {
        for (a, b, c) in [(1.0, 0.2, 5.0), (0.0, 0.5, 2.0)] {
            let [a, b, c] = [a, b, c].map(|x| QParam::new(x).unwrap());
            worst = worst.max(verify::check_composition(&spec(s), a, b, c).unwrap());
        }
    }
    within(worst, 1e-10, "two-path composition")
}

fn criterion_9() -> Outcome {
    timed(Duration::from_secs(5), || {
        let a1 = spec("A1");
        let dh: Vec<DenseMatrix> = cartan_generators(&a1).iter().map(|h| coproduct_cartan(h, 3)).collect();
        let mut orth: f64 = 0.0;
        let mut commute: f64 = 0.0;
        let mut extreme: f64 = 0.0;
        for qv in [0.5, 2.0] {
            let p = coassoc::phi(&a1, q(qv)).unwrap().matrix;
            orth = orth.max(linops::orthogonality_defect(&p));
            for h in &dh {
                commute = commute.max(linops::commutator_residual(&p, h));
            }
            for i in [0, 7] {
                for j in 0..8 {
                    let target = if i == j { 1.0 } else { 0.0 };
                    extreme = extreme.max((p[(i, j)] - target).abs()).max((p[(j, i)] - target).abs());
                }
            }
        }
        let one = coassoc::phi(&a1, QParam::ONE).unwrap().matrix;
        let at_one = linops::residual(&one, &DenseMatrix::identity(8, 8)).unwrap();
        let parts = [
            within(orth, 1e-10, "orthogonality"),
            within(at_one, 1e-12, "phi(1) - I"),
            within(commute, 1e-10, "cartan commutator"),
            within(extreme, 1e-10, "extreme weight blocks"),
        ];
        Outcome {
            pass: parts.iter().all(|p| p.pass),
            detail: parts.iter().map(|p| p.detail.as_str()).collect::<Vec<_>>().join("; "),
        }
    })
}

fn criterion_10() -> Outcome {
    let df = match coassoc::racah_coboundary(&spec("A1")) {
        Ok(m) => m,
        Err(e) => {
            return Outcome {
                pass: false,
                detail: format!("racah coboundary failed: {e}"),
            }
        }
    };
    // weight +1 sector of the triple: product states 1, 2, 4
    let idx = [1usize, 2, 4];
    let block = DenseMatrix::from_fn(3, 3, |r, c| df[(idx[r], idx[c])]);
    let half = HalfInt::from_twice(1);
    let oracle = racah_oracle(half, half, half);
    let j = oracle.iter().find(|b| b.total == half).unwrap();
    let mut expect = DenseMatrix::zeros(3, 3);
    expect[(0, 0)] = 1.0;
    expect.view_mut((1, 1), (2, 2)).copy_from(&j.matrix);
    let r = signed_permutation_residual(&block, &expect).unwrap();
    within(r, 1e-6, "A1 dF[01] weight +1 block vs recoupling oracle, up to signed permutation")
}

fn criterion_11() -> Outcome {
    let a1 = spec("A1");
    let mut r = rmatrices::r_bar(&a1, q(2.0)).unwrap().matrix;
    r[(1, 1)] = 0.0;
    let ybe = Check::new("tampered yang-baxter", verify::check_yang_baxter(&r, 2).unwrap(), verify::PAIR_TOL);
    let f = f_interval(&a1, q(2.0), QParam::ONE).unwrap().matrix * 1.01;
    let orth = Check::new("scaled orthogonality", verify::check_orthogonality(&f), verify::PAIR_TOL);
    let ybe_fails = !ybe.pass;
    let orth_fails = !orth.pass && orth.residual >= 0.02;
    let report = VerificationReport::new(&a1, &[2.0], vec![ybe, orth]);
    let clean = verify::run_suite(&a1, &[2.0]).unwrap();
    let exit = |r: &VerificationReport| if r.overall { 0 } else { 1 };
    Outcome {
        pass: ybe_fails && orth_fails && exit(&report) == 1 && exit(&clean) == 0,
        detail: format!(
            "tampered YBE fails: {ybe_fails}, scaled F fails: {orth_fails}, exit codes tampered {} clean {}",
            exit(&report),
            exit(&clean)
        ),
    }
}

fn criterion_12() -> Outcome {
    let mut worst: f64 = 0.0;
    for s in ["A1", "A2", "B1"] {
        for qv in [0.25, 4.0] {
            worst = worst.max(verify::check_leg_swap(&spec(s), q(qv)).unwrap());
        }
    }
    within(worst, 1e-10, "F(1/q) - swap F(q)")
}

fn main() -> ExitCode {
    let criteria: [Criterion; 12] = [
        ("closed rotation A1", criterion_1),
        ("crystal-referenced A1", criterion_2),
        ("orthogonality", criterion_3),
        ("twist relation", criterion_4),
        ("projector intertwining", criterion_5),
        ("crystal limit", criterion_6),
        ("Clebsch-Gordan identification", criterion_7),
        ("composition law", criterion_8),
        ("coassociator", criterion_9),
        ("Racah coboundary", criterion_10),
        ("negative controls", criterion_11),
        ("leg swap", criterion_12),
    ];
    let mut all = true;
    for (k, (name, run)) in criteria.iter().enumerate() {
        let o = run();
        all &= o.pass;
        println!("{} {:>2} {name}: {}", if o.pass { "PASS" } else { "FAIL" }, k + 1, o.detail);
    }
    if all {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
