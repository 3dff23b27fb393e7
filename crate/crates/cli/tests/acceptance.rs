//! Acceptance suite: one PASS/FAIL line per criterion, non-zero exit if any
//! criterion fails.

use num_complex::Complex64;
use opcalc::dilation::{self, BlockVector, DilationModel, SampleSpec, N_MAX, QUOTIENT_TOL};
use opcalc::funcalc::{self, CalculusDomain};
use opcalc::operator::{resolvent, spectral_norm, CMat, CVec, EigenDecomposition};
use opcalc::rng::{complex_normal, seeded, uniform, CheckRng};
use opcalc::semigroup::{self, PhiSpec};
use opcalc::{ComplexMatrix, HoloFunction, Rational};
use rand::Rng;
use std::f64::consts::PI;
use std::process::Command;
use std::time::Instant;

type Outcome = Result<String, String>;

const SECTOR_ETA: f64 = 1.3;
const STRIP_SIGMA: f64 = 3.0;
const HALFPLANE_ETA: f64 = 0.25;
const K_SIGMA: f64 = 2.3;
const K_A: f64 = 1.0;
const K_THETA: f64 = 0.25;

fn domains() -> [(&'static str, CalculusDomain); 4] {
    [
        ("sector", CalculusDomain::Sector { eta: SECTOR_ETA }),
        ("strip", CalculusDomain::Strip { sigma: STRIP_SIGMA }),
        ("half_plane", CalculusDomain::HalfPlane { eta: HALFPLANE_ETA }),
        (
            "k_region",
            CalculusDomain::KRegion {
                sigma_prime: K_SIGMA,
                a: K_A,
                theta_prime: K_THETA,
            },
        ),
    ]
}

/// Runs the named wrapper for `domain`.
fn fc_any(f: &HoloFunction, a: &ComplexMatrix, domain: &CalculusDomain, tol: f64) -> opcalc::Result<CMat> {
    let r = match *domain {
        CalculusDomain::Sector { eta } => funcalc::fc_sector(f, a, eta, tol)?,
        CalculusDomain::Strip { sigma } => funcalc::fc_strip(f, a, sigma, tol)?,
        CalculusDomain::HalfPlane { eta } => funcalc::fc_halfplane(f, a, eta, tol)?,
        CalculusDomain::KRegion {
            sigma_prime,
            a: shift,
            theta_prime,
        } => funcalc::fc_kregion(f, a, sigma_prime, shift, theta_prime, tol)?,
        CalculusDomain::ShiftedSector { .. } => funcalc::fc(f, a, domain, tol)?,
    };
    Ok(r.value.into_inner())
}

fn rel(a: &CMat, b: &CMat) -> f64 {
    spectral_norm(&(a - b)) / spectral_norm(b).max(1e-300)
}

/// Eigenvalue in the box `Re ∈ [0.5, 2]`, `|Im| ≤ 1`.
fn box_eigenvalue(rng: &mut CheckRng) -> Complex64 {
    Complex64::new(uniform(rng, 0.5, 2.0), uniform(rng, -1.0, 1.0))
}

/// Diagonalizable matrix with spectrum in the box and eigenvector
/// condition number below 10³.
fn random_diagonalizable(rng: &mut CheckRng) -> ComplexMatrix {
    loop {
        let d = rng.random_range(1..=8);
        let lambdas: Vec<Complex64> = (0..d).map(|_| box_eigenvalue(rng)).collect();
        let v = CMat::identity(d, d) + CMat::from_fn(d, d, |_, _| complex_normal(rng) * 0.3);
        let Some(vinv) = v.clone().try_inverse() else { continue };
        let a = &v * CMat::from_diagonal(&CVec::from_vec(lambdas)) * vinv;
        let Ok(a) = ComplexMatrix::new(a) else { continue };
        if EigenDecomposition::new(&a).map(|e| e.condition() < 1e3).unwrap_or(false) {
            return a;
        }
    }
}

/// Pole with `Re ≤ −4` and `|Im| ≤ 1`: outside every integration domain.
fn far_pole(rng: &mut CheckRng) -> Complex64 {
    Complex64::new(uniform(rng, -7.0, -4.0), uniform(rng, -1.0, 1.0))
}

/// Rational test functions holomorphic on a neighbourhood of every domain.
fn catalog(rng: &mut CheckRng) -> Vec<HoloFunction> {
    let one = Complex64::new(1.0, 0.0);
    let (p1, p2, p3) = (far_pole(rng), far_pole(rng), far_pole(rng));
    let (z1, z2) = (box_eigenvalue(rng), box_eigenvalue(rng));
    vec![
        HoloFunction::resolvent_kernel(far_pole(rng)),
        HoloFunction::resolvent_power(far_pole(rng), 2),
        HoloFunction::rational(Rational::from_roots(one * 5.0, &[z1], &[p1, p2])),
        HoloFunction::rational(Rational::from_roots(one * 20.0, &[z1, z2], &[p1, p2, p3])),
    ]
}

fn c1_calculus_oracle() -> Outcome {
    let start = Instant::now();
    let mut rng = seeded(101);
    let mut worst = 0.0f64;
    let mut count = 0;
    for _ in 0..50 {
        let a = random_diagonalizable(&mut rng);
        let eig = EigenDecomposition::new(&a).map_err(|e| e.to_string())?;
        for f in catalog(&mut rng) {
            let oracle = eig.apply(|z| f.eval(z));
            for (name, d) in domains() {
                let v = fc_any(&f, &a, &d, 1e-10).map_err(|e| format!("{name}: {e}"))?;
                let err = rel(&v, &oracle);
                if err > 1e-6 {
                    return Err(format!("{name}, {}: relative error {err:e}", f.name()));
                }
                worst = worst.max(err);
                count += 1;
            }
        }
    }
    let secs = start.elapsed().as_secs_f64();
    if secs > 60.0 {
        return Err(format!("runtime {secs:.1} s exceeds 60 s"));
    }
    Ok(format!("{count} integrals, worst relative error {worst:.2e}, {secs:.1} s"))
}

fn c2_resolvent() -> Outcome {
    let mut rng = seeded(202);
    let mut worst = 0.0f64;
    for _ in 0..20 {
        let a = random_diagonalizable(&mut rng);
        let mu = far_pole(&mut rng);
        let exact = resolvent(&a, mu).map_err(|e| e.to_string())?.into_inner();
        let f = HoloFunction::resolvent_kernel(mu);
        for (name, d) in domains() {
            let v = fc_any(&f, &a, &d, 1e-11).map_err(|e| format!("{name}: {e}"))?;
            let err = rel(&v, &exact);
            if err > 1e-8 {
                return Err(format!("{name}: relative error {err:e}"));
            }
            worst = worst.max(err);
        }
    }
    Ok(format!("worst relative error {worst:.2e}"))
}

fn c3_strip_halfplane() -> Outcome {
    let mut rng = seeded(303);
    let mut worst = 0.0f64;
    for i in 0..20 {
        let a = random_diagonalizable(&mut rng);
        let fs = catalog(&mut rng);
        let f = &fs[i % fs.len()];
        let s = funcalc::fc_strip(f, &a, STRIP_SIGMA, 1e-10).map_err(|e| e.to_string())?.value.into_inner();
        let h = funcalc::fc_halfplane(f, &a, HALFPLANE_ETA, 1e-10).map_err(|e| e.to_string())?.value.into_inner();
        let err = rel(&s, &h);
        if err > 1e-6 {
            return Err(format!("case {i}: disagreement {err:e}"));
        }
        worst = worst.max(err);
    }
    Ok(format!("worst disagreement {worst:.2e}"))
}

fn c4_multiplicativity() -> Outcome {
    let mut rng = seeded(404);
    let mut worst = 0.0f64;
    let mut pairs = 0;
    for _ in 0..5 {
        let a = random_diagonalizable(&mut rng);
        let fs = catalog(&mut rng);
        for (name, d) in domains() {
            for i in 0..fs.len() {
                for j in i..fs.len() {
                    let defect = funcalc::multiplicativity_check(&fs[i], &fs[j], &a, &d, 1e-9).map_err(|e| format!("{name}: {e}"))?;
                    if defect > 1e-8 {
                        return Err(format!("{name}, {} · {}: defect {defect:e}", fs[i].name(), fs[j].name()));
                    }
                    worst = worst.max(defect);
                    pairs += 1;
                }
            }
        }
    }
    Ok(format!("{pairs} pairs, worst defect {worst:.2e}"))
}

fn random_models() -> Vec<DilationModel> {
    let mut rng = seeded(505);
    (0..100).map(|_| DilationModel::random(&mut rng, 6).expect("valid model")).collect()
}

fn scalar_model(alpha: f64) -> DilationModel {
    DilationModel::new(ComplexMatrix::real_diagonal(&[0.5]), 0.5, alpha, 2.0).expect("valid model")
}

fn c5_sandwich(models: &[DilationModel]) -> Outcome {
    let mut worst = f64::INFINITY;
    for (i, m) in models.iter().enumerate() {
        let spec = SampleSpec { count: 5, seed: i as u64, max_support: 1 };
        let r = dilation::sandwich_check(m, &spec, N_MAX, QUOTIENT_TOL).map_err(|e| format!("model {i}: {e}"))?;
        if !r.pass {
            return Err(format!("model {i}: {r:?}"));
        }
        worst = worst.min(r.worst_margin);
    }
    let e1 = BlockVector::embed(&CVec::from_element(1, Complex64::new(1.0, 0.0)), 2.0);
    let q64 = dilation::quotient_norm_at(&scalar_model(2.0), &e1, 64).map_err(|e| e.to_string())?;
    if (q64 - 0.866025).abs() > 1e-4 {
        return Err(format!("scalar case at N = 64: {q64}"));
    }
    let sharp = dilation::iota_norm(&scalar_model(2f64.sqrt()), &e1.blocks[0], N_MAX, QUOTIENT_TOL).map_err(|e| e.to_string())?;
    if (sharp - 1.0 / 2f64.sqrt()).abs() > 1e-4 {
        return Err(format!("α = √2 case: {sharp} vs ‖x‖/α = {}", 1.0 / 2f64.sqrt()));
    }
    Ok(format!("100 models, worst relative margin {worst:.2e}; scalar {q64:.6}; α = √2 gives {sharp:.6}"))
}

fn c6_norm_inequality(models: &[DilationModel]) -> Outcome {
    let mut worst = f64::INFINITY;
    for (i, m) in models.iter().enumerate() {
        let spec = SampleSpec { count: 5, seed: 1000 + i as u64, max_support: 1 };
        let us = dilation::commutant_family(m);
        let r = dilation::norm_inequality_check(m, &us, &spec, N_MAX, QUOTIENT_TOL).map_err(|e| format!("model {i}: {e}"))?;
        if !r.pass {
            return Err(format!("model {i}: {r:?}"));
        }
        worst = worst.min(r.worst_margin);
    }
    Ok(format!("U ∈ {{T, T², T³, I+T}} on 100 models, worst relative margin {worst:.2e}"))
}

fn c7_g_lower_bound(models: &[DilationModel]) -> Outcome {
    let mut worst = f64::INFINITY;
    for (i, m) in models.iter().enumerate() {
        let spec = SampleSpec { count: 10_000, seed: 2000 + i as u64, max_support: 32 };
        let r = dilation::g_lower_bound_check(m, &spec).map_err(|e| format!("model {i}: {e}"))?;
        if !r.pass {
            return Err(format!("model {i}: {r:?}"));
        }
        worst = worst.min(r.observed / (m.alpha - 1.0));
    }
    Ok(format!("10⁴ samples × 100 models, min ratio / (α−1) = {worst:.4}"))
}

fn c8_inverse_action(models: &[DilationModel]) -> Outcome {
    let mut worst = 0.0f64;
    let mut rng = seeded(808);
    for (i, m) in models.iter().enumerate() {
        for _ in 0..50 {
            let len = rng.random_range(1..=6);
            let v = BlockVector::random(&mut rng, len, m.dim(), m.p);
            let r = dilation::inverse_action_check(m, &v, N_MAX, QUOTIENT_TOL).map_err(|e| format!("model {i}: {e}"))?;
            if !r.pass {
                return Err(format!("model {i}: {r:?}"));
            }
            worst = worst.max(r.range_residual).max(r.inverse_prep_residual);
        }
    }
    Ok(format!("50 v × 100 models, worst ‖[Gv]‖/‖v‖ = {worst:.2e}"))
}

fn generators() -> Vec<ComplexMatrix> {
    let mut rng = seeded(909);
    (0..20)
        .map(|i| semigroup::random_stable_generator(&mut rng, 2 + i % 5).expect("finite generator"))
        .collect()
}

fn c9_lower_bound() -> Outcome {
    let grid = semigroup::uniform_grid(0.0, 5.0, 101).map_err(|e| e.to_string())?;
    let mut worst_change = 0.0f64;
    for (i, a) in generators().iter().enumerate() {
        let alpha = 1.0 + 0.1 * (i + 1) as f64;
        let cert = semigroup::exponential_lower_bound_check(a, 1.0, alpha, &grid).map_err(|e| e.to_string())?;
        let nu = semigroup::nu_rate(1.0, cert.c, alpha).map_err(|e| e.to_string())?;
        if !cert.pass || (cert.nu - nu).abs() > 1e-14 * nu.abs().max(1.0) {
            return Err(format!("generator {i}: m = {}, change = {}, pass = {}", cert.m, cert.refinement_change, cert.pass));
        }
        worst_change = worst_change.max(cert.refinement_change);
    }
    let diag = ComplexMatrix::real_diagonal(&[1.0, 2.0]);
    let cert = semigroup::exponential_lower_bound_check(&diag, 1.0, 2f64.sqrt(), &grid).map_err(|e| e.to_string())?;
    if (cert.nu + 2.346574).abs() > 1e-6 {
        return Err(format!("diagonal case: ν = {}", cert.nu));
    }
    Ok(format!("20 generators, worst grid-refinement change {:.2e}; diag(1,2) ν = {:.7}", worst_change, cert.nu))
}

fn c10_gamma() -> Outcome {
    let grid = semigroup::uniform_grid(0.0, 4.0, 81).map_err(|e| e.to_string())?;
    let mut list = generators();
    list.push(ComplexMatrix::real_diagonal(&[1.0, 2.0]));
    list.push(ComplexMatrix::zeros(3));
    let (mut pairs, mut worst) = (0, 0.0f64);
    for (i, a) in list.iter().enumerate() {
        let r = semigroup::gamma_submultiplicativity_check(a, &grid).map_err(|e| e.to_string())?;
        if !r.pass {
            return Err(format!("generator {i}: worst ratio {}", r.worst_ratio));
        }
        pairs += r.pairs;
        worst = worst.max(r.worst_ratio);
    }
    Ok(format!("{pairs} pairs, max γ(t+s)/(γ(t)γ(s)) = {worst:.12}"))
}

fn c11_example() -> Outcome {
    let mut spread = 0.0f64;
    for phi in PhiSpec::ALL {
        for t in [0.05, 0.1, 0.2, 0.5] {
            let r = semigroup::example32_norm(phi, t).map_err(|e| e.to_string())?;
            if !r.agree {
                return Err(format!("{}, t = {t}: routes differ, {r:?}", phi.name()));
            }
            spread = spread.max(r.log_spread);
        }
        let id = semigroup::example32_identity_check(phi, &[0.05, 0.1, 0.2, 0.5, 0.9]).map_err(|e| e.to_string())?;
        if !id.pass {
            return Err(format!("{}: identity check failed {:?}", phi.name(), id.rows));
        }
        let mut prev = f64::NEG_INFINITY;
        for t in [0.1, 0.05, 0.025] {
            let r = semigroup::example32_norm(phi, t).map_err(|e| e.to_string())?;
            if r.log_direct <= prev {
                return Err(format!("{}: no blow-up at t = {t}", phi.name()));
            }
            prev = r.log_direct;
        }
    }
    let r = semigroup::example32_norm(PhiSpec::Xsq, 0.1).map_err(|e| e.to_string())?;
    for v in [r.norm_direct, r.norm_reduced, r.norm_young] {
        if (v / 1.21825 - 1.0).abs() > 0.01 {
            return Err(format!("φ = x², t = 0.1: {v}"));
        }
    }
    Ok(format!("max |Δ log norm| = {spread:.2e}; φ = x², t = 0.1 gives {:.5}", r.norm_direct))
}

fn c12_folklore() -> Outcome {
    let r = funcalc::folklore_check(1.0, 0.5, 1.0, 0.75 * PI, 0.625 * PI, 20, 0).map_err(|e| e.to_string())?;
    if (r.c_theoretical - 49.81).abs() > 0.01 {
        return Err(format!("C = {}", r.c_theoretical));
    }
    if r.ratios.len() != 20 || !r.pass {
        return Err(format!("worst ratio {} against C = {}", r.worst_ratio_observed, r.c_theoretical));
    }
    Ok(format!("C = {:.4}, worst sampled ratio {:.4}", r.c_theoretical, r.worst_ratio_observed))
}

fn c13_three_integrals() -> Outcome {
    let mut rng = seeded(1313);
    let domain = domains()[3].1;
    let mut worst = 0.0f64;
    for i in 0..10 {
        let a = random_diagonalizable(&mut rng);
        let fs = catalog(&mut rng);
        let eta = uniform(&mut rng, 0.1, 1.0);
        let r = funcalc::resolvent_shift_identity_check(&fs[i % fs.len()], &a, eta, &domain, 1e-8).map_err(|e| e.to_string())?;
        if r.defect > 1e-6 {
            return Err(format!("case {i}: defect {:e}", r.defect));
        }
        worst = worst.max(r.defect);
    }
    Ok(format!("worst defect {worst:.2e}"))
}

fn run_cli(args: &[&str]) -> Result<(Vec<u8>, Vec<u8>), String> {
    let out = Command::new(env!("CARGO_BIN_EXE_opcalc"))
        .args(args)
        .output()
        .map_err(|e| e.to_string())?;
    if !out.status.success() {
        return Err(format!("{args:?} exited with {}: {}", out.status, String::from_utf8_lossy(&out.stderr)));
    }
    let file = args
        .iter()
        .position(|a| *a == "--output")
        .map(|i| std::fs::read(args[i + 1]).map_err(|e| e.to_string()))
        .transpose()?
        .unwrap_or_default();
    Ok((out.stdout, file))
}

fn c14_determinism() -> Outcome {
    let dir = std::env::temp_dir().join(format!("opcalc-acceptance-{}", std::process::id()));
    std::fs::create_dir_all(&dir).map_err(|e| e.to_string())?;
    let mut rng = seeded(1414);
    let t = ComplexMatrix::new(CMat::from_fn(4, 4, |_, _| complex_normal(&mut rng))).map_err(|e| e.to_string())?;
    let c = opcalc::operator::smallest_singular_value(&t) * 0.9;
    let model = DilationModel::new(t, c, 1.6, 2.5).map_err(|e| e.to_string())?;
    let model_path = dir.join("model.json");
    std::fs::write(&model_path, serde_json::to_string(&model).map_err(|e| e.to_string())?).map_err(|e| e.to_string())?;
    let model_arg = model_path.to_str().ok_or("non-UTF-8 temp path")?.to_string();
    let mut compared = 0;
    for (k, sub) in [
        vec!["dilate", "--input", model_arg.as_str(), "--seed", "42", "--samples", "10", "--g-samples", "2000", "--v-samples", "5"],
        vec!["folklore", "--seed", "7"],
        vec!["example32", "--phi", "xlog", "--format", "csv"],
    ]
    .into_iter()
    .enumerate()
    {
        let mut runs = Vec::new();
        for r in 0..2 {
            let out = dir.join(format!("out-{k}-{r}"));
            let out = out.to_str().ok_or("non-UTF-8 temp path")?.to_string();
            let mut args = sub.clone();
            args.extend(["--output", out.as_str()]);
            runs.push(run_cli(&args)?);
        }
        if runs[0] != runs[1] || runs[0].0.is_empty() {
            return Err(format!("{} outputs differ between runs", sub[0]));
        }
        compared += runs[0].0.len() + runs[0].1.len();
    }
    let _ = std::fs::remove_dir_all(&dir);
    Ok(format!("dilate, folklore, example32: {compared} bytes identical across two runs"))
}

type Criterion<'a> = (&'static str, Box<dyn Fn() -> Outcome + 'a>);

fn main() {
    let models = random_models();
    let criteria: Vec<Criterion> = vec![
        ("functional-calculus oracle suite", Box::new(c1_calculus_oracle)),
        ("resolvent reproduction", Box::new(c2_resolvent)),
        ("strip / half-plane agreement", Box::new(c3_strip_halfplane)),
        ("multiplicativity", Box::new(c4_multiplicativity)),
        ("quotient-norm sandwich", Box::new(|| c5_sandwich(&models))),
        ("norm inequality for the commutant", Box::new(|| c6_norm_inequality(&models))),
        ("lower bound of G", Box::new(|| c7_g_lower_bound(&models))),
        ("inverse action", Box::new(|| c8_inverse_action(&models))),
        ("exponential lower bound", Box::new(c9_lower_bound)),
        ("gamma submultiplicativity", Box::new(c10_gamma)),
        ("blow-up example", Box::new(c11_example)),
        ("half-plane derivative constant", Box::new(c12_folklore)),
        ("three-integral identity", Box::new(c13_three_integrals)),
        ("CLI determinism", Box::new(c14_determinism)),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = check();
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("PASS criterion {:2} {name}: {detail} [{secs:.2} s]", i + 1),
            Err(detail) => {
                failed += 1;
                println!("FAIL criterion {:2} {name}: {detail} [{secs:.2} s]", i + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
