use std::path::{Path, PathBuf};

use lpvlfr::harness::{alpv_isomorphic, lfr_isomorphic, Isomorphic};
use lpvlfr::lfr::{forbidden_word_check, is_lpv_lfr};
use lpvlfr::{
    alpv_equivalence_horizon, compare_markov, equivalent_to_lpv_lfr, example1, find_alpv_isomorphism,
    find_lfr_isomorphism, is_minimal_alpv, is_minimal_lfr, lfr_formal_comparison,
    lfr_to_alpv, lpv_lfr_io_equivalent, lpv_to_lfr_mr, minimal_form_is_lpv_lfr, minimize_alpv, minimize_lfr,
    simulate_alpv, simulate_lpv_lfr, truncated_star_series, AlpvModel, LfrModel, Model, RankTolerance, Signal,
};

use crate::error::CliError;
use crate::model_file::{read_model, render_model, write_model};
use crate::signals::{read_signal, render_output};
use crate::{CheckMode, Direction, Engine};

fn verdict(holds: bool, detail: &str) -> u8 {
    println!("RESULT: {holds} {detail}");
    u8::from(!holds)
}

fn emit_model(model: &Model, output: Option<&Path>, report: &str) -> Result<(), CliError> {
    match output {
        Some(path) => {
            write_model(path, model)?;
            println!("{report}");
        }
        None => {
            eprintln!("{report}");
            print!("{}", render_model(model));
        }
    }
    Ok(())
}

fn describe(model: &Model) -> String {
    match model {
        Model::Alpv(s) => format!("ALPV np={} nx={} nu={} ny={}", s.np(), s.nx(), s.nu(), s.ny()),
        Model::Lfr(m) => format!("LFR blocks {:?} (dim {}) p={} m={}", m.block_sizes(), m.dim(), m.outputs(), m.inputs()),
    }
}

pub fn convert(input: &Path, direction: Direction, output: Option<&Path>, tol: &RankTolerance) -> Result<u8, CliError> {
    let model = read_model(input)?;
    let converted = match (direction, &model) {
        (Direction::AlpvToLfrMr, Model::Alpv(s)) => Model::Lfr(lpv_to_lfr_mr(s, tol)?),
        (Direction::LfrToAlpv, Model::Lfr(m)) => Model::Alpv(lfr_to_alpv(m, tol)?),
        (_, other) => {
            return Err(CliError::Usage(format!(
                "{} holds an {} model, which this direction does not accept",
                input.display(),
                other.kind()
            )))
        }
    };
    emit_model(&converted, output, &format!("{} -> {}", describe(&model), describe(&converted)))?;
    Ok(0)
}

fn load(files: &[PathBuf], count: usize, mode: &str) -> Result<Vec<Model>, CliError> {
    if files.len() != count {
        return Err(CliError::Usage(format!("check {mode} takes {count} file(s), got {}", files.len())));
    }
    files.iter().map(|f| read_model(f)).collect()
}

fn lfr_only<'a>(model: &'a Model, what: &str) -> Result<&'a LfrModel, CliError> {
    match model {
        Model::Lfr(m) => Ok(m),
        Model::Alpv(_) => Err(CliError::Usage(format!("{what} needs LFR models"))),
    }
}

/// ALPVs enter LFR-level comparisons through their MR transform.
fn to_lfr(model: &Model, tol: &RankTolerance) -> Result<LfrModel, CliError> {
    Ok(match model {
        Model::Lfr(m) => m.clone(),
        Model::Alpv(s) => lpv_to_lfr_mr(s, tol)?,
    })
}

pub fn check(mode: CheckMode, files: &[PathBuf], tol: &RankTolerance) -> Result<u8, CliError> {
    match mode {
        CheckMode::Minimal => {
            let models = load(files, 1, "minimal")?;
            let status = match &models[0] {
                Model::Alpv(s) => is_minimal_alpv(s, tol),
                Model::Lfr(m) => is_minimal_lfr(m, tol),
            };
            Ok(verdict(status.is_minimal(), &format!("{status:?}")))
        }
        CheckMode::Equiv => {
            let models = load(files, 2, "equiv")?;
            let cmp = match (&models[0], &models[1]) {
                (Model::Alpv(a), Model::Alpv(b)) => {
                    let horizon = alpv_equivalence_horizon(a, b, tol)?;
                    compare_markov(a, b, horizon, tol)?
                }
                (a, b) => lfr_formal_comparison(&to_lfr(a, tol)?, &to_lfr(b, tol)?, tol)?,
            };
            let detail = format!(
                "max deviation {:.3e} (scale {:.3e}) over {} coefficients up to length {}",
                cmp.max_deviation, cmp.scale, cmp.compared, cmp.horizon
            );
            Ok(verdict(cmp.equivalent, &detail))
        }
        CheckMode::Isomorphic => {
            let models = load(files, 2, "isomorphic")?;
            let (answer, detail) = match (&models[0], &models[1]) {
                (Model::Alpv(a), Model::Alpv(b)) => {
                    let answer = alpv_isomorphic(a, b, tol)?;
                    let detail = if a.nx() == b.nx() {
                        find_alpv_isomorphism(a, b, tol)?.describe()
                    } else {
                        format!("state dimensions {} and {} differ", a.nx(), b.nx())
                    };
                    (answer, detail)
                }
                (Model::Lfr(a), Model::Lfr(b)) => {
                    let answer = lfr_isomorphic(a, b, tol)?;
                    let detail = if a.block_sizes() == b.block_sizes() {
                        find_lfr_isomorphism(a, b, tol)?.describe()
                    } else {
                        format!("block sizes {:?} and {:?} differ", a.block_sizes(), b.block_sizes())
                    };
                    (answer, detail)
                }
                _ => return Err(CliError::Usage("isomorphism needs two models of the same kind".into())),
            };
            Ok(verdict(answer == Isomorphic::Yes, &detail))
        }
        CheckMode::LpvStructure => {
            let models = load(files, 1, "lpv-structure")?;
            let m = lfr_only(&models[0], "lpv-structure")?;
            let forbidden = forbidden_word_check(m, tol);
            println!(
                "forbidden words up to length {}: {} checked, largest coefficient {:.3e}",
                forbidden.horizon, forbidden.checked, forbidden.max_abs
            );
            println!("equivalent to an LPV-LFR: {}", equivalent_to_lpv_lfr(m, tol));
            println!("minimal form is an LPV-LFR: {}", minimal_form_is_lpv_lfr(m, tol)?);
            Ok(verdict(is_lpv_lfr(m, tol), "F_ij negligible for all i, j > 1"))
        }
        CheckMode::LpvEquiv => match files.len() {
            1 => {
                let models = load(files, 1, "lpv-equiv")?;
                let m = lfr_only(&models[0], "lpv-equiv")?;
                let forbidden = forbidden_word_check(m, tol);
                let detail = match &forbidden.witness {
                    Some(w) => format!("largest forbidden coefficient {:.3e} at word {w}", forbidden.max_abs),
                    None => "no forbidden words with nonzero coefficient".to_string(),
                };
                Ok(verdict(equivalent_to_lpv_lfr(m, tol), &detail))
            }
            _ => {
                let models = load(files, 2, "lpv-equiv")?;
                let a = lfr_only(&models[0], "lpv-equiv")?;
                let b = lfr_only(&models[1], "lpv-equiv")?;
                let holds = lpv_lfr_io_equivalent(a, b, tol)?;
                Ok(verdict(holds, "input-output equivalence of LPV-LFRs"))
            }
        },
    }
}

pub fn minimize(input: &Path, output: Option<&Path>, tol: &RankTolerance) -> Result<u8, CliError> {
    let (minimal, report) = match read_model(input)? {
        Model::Alpv(s) => {
            let (m, r) = minimize_alpv(&s, tol)?;
            (Model::Alpv(m), r)
        }
        Model::Lfr(m) => {
            let (min, r) = minimize_lfr(&m, tol)?;
            (Model::Lfr(min), r)
        }
    };
    let line = format!(
        "dimension {} -> {} (reachable part {})",
        report.original, report.minimal, report.reachable
    );
    emit_model(&minimal, output, &line)?;
    Ok(0)
}

fn schedule(path: Option<&Path>, np: usize, len: usize) -> Result<Signal, CliError> {
    match path {
        Some(p) => read_signal(p, np),
        None if np == 0 => Ok(Signal::zeros(0, len)),
        None => Err(CliError::Usage(format!("model has {np} scheduling parameters; pass --schedule"))),
    }
}

pub fn simulate(
    model: &Path,
    input: &Path,
    schedule_path: Option<&Path>,
    engine: Engine,
    word_horizon: Option<usize>,
    tol: &RankTolerance,
) -> Result<u8, CliError> {
    let model = read_model(model)?;
    let (nu, np) = match &model {
        Model::Alpv(s) => (s.nu(), s.np()),
        Model::Lfr(m) => (m.inputs(), m.channels().saturating_sub(1)),
    };
    let u = read_signal(input, nu)?;
    let p = schedule(schedule_path, np, u.len())?;
    let y = match engine {
        Engine::Direct => {
            let sigma: AlpvModel = match &model {
                Model::Alpv(s) => s.clone(),
                Model::Lfr(m) => lfr_to_alpv(m, tol)?,
            };
            simulate_alpv(&sigma, &u, &p, None)?.y
        }
        Engine::Loop => simulate_lpv_lfr(&to_lfr(&model, tol)?, &u, &p, tol)?,
        Engine::Series => {
            let horizon = word_horizon.unwrap_or((2 * u.len()).saturating_sub(1).max(1));
            truncated_star_series(&to_lfr(&model, tol)?, &u, &p, horizon, tol)?
        }
    };
    print!("{}", render_output(&y));
    Ok(0)
}

fn assertion(ok: bool, what: &str, detail: &str) -> bool {
    println!("{} {what}: {detail}", if ok { "PASS" } else { "FAIL" });
    ok
}

pub fn example1(printed_tol: f64, write_dir: Option<&Path>, tol: &RankTolerance) -> Result<u8, CliError> {
    let loose = RankTolerance::new(printed_tol, tol.abs).map_err(|e| CliError::Usage(e.to_string()))?;
    let sigma = example1::alpv_sigma();
    let (m, m_tilde, m_hat) = (example1::lfr_m(), example1::lfr_m_tilde(), example1::lfr_m_hat());
    let mr = lpv_to_lfr_mr(&sigma, tol)?;
    if let Some(dir) = write_dir {
        write_model(&dir.join("sigma.json"), &Model::Alpv(sigma.clone()))?;
        for (file, x) in [("m.json", &m), ("m_tilde.json", &m_tilde), ("m_hat.json", &m_hat), ("mr.json", &mr)] {
            write_model(&dir.join(file), &Model::Lfr(x.clone()))?;
        }
    }
    for (name, x) in [("M", &m), ("M~", &m_tilde), ("M^", &m_hat), ("MR", &mr)] {
        println!("{name}: blocks {:?}, dim {}", x.block_sizes(), x.dim());
    }

    let mut ok = true;
    let cmp = lfr_formal_comparison(&m, &m_tilde, tol)?;
    ok &= assertion(
        cmp.equivalent,
        "M and M~ formally equivalent",
        &format!("max deviation {:.3e} up to length {}", cmp.max_deviation, cmp.horizon),
    );
    let search = find_lfr_isomorphism(&m, &m_tilde, tol)?;
    ok &= assertion(!search.is_found(), "M and M~ not isomorphic", &search.describe());
    let status = is_minimal_alpv(&sigma, tol);
    ok &= assertion(status.is_minimal(), "Sigma minimal", &format!("{status:?}"));
    let status = is_minimal_lfr(&mr, tol);
    ok &= assertion(
        mr.block_sizes() == [2, 2] && status.is_minimal(),
        "MR has blocks {2, 2} and is minimal",
        &format!("{:?}, {status:?}", mr.block_sizes()),
    );
    let cmp = lfr_formal_comparison(&mr, &m_hat, &loose)?;
    ok &= assertion(
        cmp.equivalent,
        "MR and M^ formally equivalent",
        &format!("max deviation {:.3e}, rel tol {printed_tol:e}", cmp.max_deviation),
    );
    let search = find_lfr_isomorphism(&mr, &m_hat, &loose)?;
    ok &= assertion(search.is_found(), "MR and M^ isomorphic", &search.describe());
    Ok(u8::from(!ok))
}
