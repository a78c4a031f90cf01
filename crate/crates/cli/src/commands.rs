use std::fs;
use std::path::Path;

use freiman_core::algnum::{condense_diagonal, DiagonalOptions};
use freiman_core::condense::{condense_iterate, exact_min_model, IterateOptions};
use freiman_core::densify::{densify_iterate, densify_step, DensifyOptions, DensifyStep};
use freiman_core::meanvalue::{bound_report, count_j_phi, count_j_phi_oracle, power_phis};
use freiman_core::numeric::{Comparison, Interval};
use freiman_core::{
    is_freiman_iso, is_tfold_freiman_iso, CondenseMode, Error, IntSet, Limits, MapKind, MapTable, PolySystem,
    VerifyLevel,
};
use num_bigint::BigInt;
use num_rational::BigRational;

use crate::args::{Command, CondenseArgs, CountArgs, DensifyArgs, MinmodelArgs, VerifyArgs};
use crate::report::{yes_no, Outcome, Report};

pub struct Summary {
    pub outcome: Outcome,
    pub fields: Vec<(&'static str, String)>,
}

pub struct Failure {
    pub outcome: Outcome,
    pub message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure {
            outcome: Outcome::of_error(&e),
            message: e.to_string(),
        }
    }
}

fn input(msg: impl Into<String>) -> Failure {
    Failure {
        outcome: Outcome::InputError,
        message: msg.into(),
    }
}

type Run = Result<Summary, Failure>;

fn ok(fields: Vec<(&'static str, String)>) -> Run {
    Ok(Summary {
        outcome: Outcome::Success,
        fields,
    })
}

pub fn run(cmd: &Command, limits: &Limits, rep: &mut Report) -> Run {
    match cmd {
        Command::Condense(a) if a.diagonal.is_some() => diagonal(a, limits, rep),
        Command::Condense(a) => condense(a, limits, rep),
        Command::Densify(a) => densify(a, limits, rep),
        Command::Count(a) => count(a, limits, rep),
        Command::Verify(a) => verify(a, limits, rep),
        Command::Minmodel(a) => minmodel(a, limits, rep),
    }
}

fn load<T>(path: &Path, parse: impl FnOnce(&str) -> freiman_core::Result<T>) -> Result<T, Failure> {
    let text = fs::read_to_string(path).map_err(|e| input(format!("{}: {e}", path.display())))?;
    parse(&text).map_err(|e| match e {
        Error::Parse { .. } => input(format!("{}: {e}", path.display())),
        other => other.into(),
    })
}

fn load_set(path: &Path) -> Result<IntSet, Failure> {
    load(path, IntSet::parse_text)
}

fn load_system(path: &Path) -> Result<PolySystem, Failure> {
    load(path, PolySystem::parse_text)
}

fn parse_mode(mode: &Option<String>, default: CondenseMode) -> Result<CondenseMode, Failure> {
    mode.as_deref()
        .map_or(Ok(default), |m| m.parse().map_err(|e: Error| input(e.to_string())))
}

/// `p/q`, an integer, or a terminating decimal.
fn parse_rational(s: &str) -> Result<BigRational, Failure> {
    let bad = || input(format!("not a rational number: {s:?}"));
    if let Some((int, frac)) = s.split_once('.') {
        let digits: BigInt = format!("{int}{frac}").parse().map_err(|_| bad())?;
        let scale = BigInt::from(10).pow(frac.len() as u32);
        return Ok(BigRational::new(digits, scale));
    }
    s.parse().map_err(|_| bad())
}

fn interval(i: &Interval) -> String {
    format!("[{:.9},{:.9}]", i.lo, i.hi)
}

fn comparison(c: &Comparison) -> String {
    format!("{} margin={:.3e} error={:.3e}", c.decision, c.margin(), c.error())
}

fn opt<T: ToString>(v: &Option<T>) -> String {
    v.as_ref().map_or_else(|| "-".to_string(), T::to_string)
}

fn condense(a: &CondenseArgs, limits: &Limits, rep: &mut Report) -> Run {
    let set = load_set(&a.set)?;
    let system = load_system(&a.system)?;
    let mode = parse_mode(&a.mode, CondenseMode::Thm32)?;
    let target_env = match &a.target_env {
        Some(t) => Some(
            t.parse::<BigInt>()
                .map_err(|_| input(format!("bad --target-env {t:?}")))?,
        ),
        None => None,
    };
    let opts = IterateOptions {
        target_env,
        h_cap: a.h_cap,
        ..IterateOptions::new(mode, a.max_steps)
    };
    let trace = condense_iterate(&set, &system, &opts, limits)?;
    rep.line(format!("initial card={} env={}", set.card(), set.env()));
    for (i, st) in trace.steps.iter().enumerate() {
        rep.line(format!(
            "step {} mode={} pi={} rho={} L={} h={} env_before={} env_after={}",
            i + 1,
            st.mode,
            opt(&st.pi),
            st.rho,
            st.l,
            st.h,
            st.env_before,
            st.env_after
        ));
    }
    rep.line(format!("stop {}", trace.stop_reason));
    if let Some(d) = &trace.stop_detail {
        rep.line(format!("# stop_detail {d}"));
    }
    rep.block("final_set", &trace.final_set.to_text());
    rep.block("map", &trace.composed_map.to_text());
    ok(vec![
        ("steps", trace.steps.len().to_string()),
        ("env_initial", set.env().to_string()),
        ("env_final", trace.final_set.env().to_string()),
        ("stop", trace.stop_reason.to_string()),
    ])
}

fn diagonal(a: &CondenseArgs, limits: &Limits, rep: &mut Report) -> Run {
    let set = load_set(&a.set)?;
    let system = load_system(&a.system)?;
    let t = a.diagonal.expect("diagonal run");
    match system.diagonal_degree() {
        Some(d) if d == t => {}
        Some(d) => {
            return Err(input(format!(
                "--diagonal {t} but the system is diagonal of degree {d}"
            )))
        }
        None => return Err(input("--diagonal needs a system of the form Σ c_j x_j^t")),
    }
    let opts = DiagonalOptions {
        mode: parse_mode(&a.mode, CondenseMode::Greedy)?,
        max_steps: a.max_steps,
        h_cap: a.h_cap,
    };
    let out = condense_diagonal(&set, &system, &opts, limits)?;
    rep.block("powers", &out.powers.to_text());
    rep.block("linear_system", &out.linear.to_text());
    for (i, st) in out.trace.steps.iter().enumerate() {
        rep.line(format!(
            "step {} mode={} pi={} rho={} h={} env_before={} env_after={}",
            i + 1,
            st.mode,
            opt(&st.pi),
            st.rho,
            st.h,
            st.env_before,
            st.env_after
        ));
    }
    rep.line(format!("stop {}", out.trace.stop_reason));
    let mut lines = String::new();
    for (x, img) in &out.map.entries {
        lines.push_str(&format!("{x} -> {} ; power: {}\n", img.root, opt(&img.power)));
    }
    rep.block("image", &lines);
    let c = &out.certificate;
    rep.line(format!("certificate t={} k={}", c.t, c.k));
    rep.line(format!(
        "certificate iso={} solutions={}/{}",
        yes_no(c.iso),
        c.solutions_source,
        c.solutions_image
    ));
    rep.line(format!(
        "certificate env={} env_exact={} env_bound={} within={}",
        c.env.value,
        yes_no(c.env.exact),
        c.env_bound,
        yes_no(c.env_within_bound)
    ));
    rep.line(format!(
        "certificate degree={} degree_cap={} within={}",
        c.degree,
        c.degree_cap,
        yes_no(c.degree_within_cap)
    ));
    rep.line(format!("certificate granville={}", yes_no(c.granville)));
    Ok(Summary {
        outcome: if c.holds() { Outcome::Success } else { Outcome::Negative },
        fields: vec![
            ("iso", yes_no(c.iso)),
            ("env", c.env.value.to_string()),
            ("env_bound", c.env_bound.to_string()),
            ("degree", c.degree.to_string()),
            ("degree_cap", c.degree_cap.to_string()),
            ("certificate", yes_no(c.holds())),
        ],
    })
}

fn step_line(i: usize, st: &DensifyStep) -> String {
    let primes: Vec<String> = st.primes.iter().map(u64::to_string).collect();
    format!(
        "step {} D={} primes={} y_start={} y_used={} card={} env={} env_bound={} ratio_before={} ratio_after={}",
        i + 1,
        st.input.card(),
        primes.join(","),
        st.y_start,
        st.y_used,
        st.output.card(),
        st.output.env(),
        st.env_bound,
        interval(&st.ratio_before.value),
        interval(&st.ratio_after.value)
    )
}

fn densify(a: &DensifyArgs, limits: &Limits, rep: &mut Report) -> Run {
    let set = load_set(&a.set)?;
    let system = load_system(&a.system)?;
    let verify = match &a.verify {
        Some(v) => Some(v.parse::<VerifyLevel>().map_err(|e| input(e.to_string()))?),
        None => None,
    };
    let opts = DensifyOptions {
        epsilon: parse_rational(&a.epsilon)?,
        verify,
        samples: a.samples,
        seed: a.seed,
    };
    if a.single {
        let st = densify_step(&set, &system, &opts, limits)?;
        step_report(rep, 0, &st);
        emit_set(rep, &st.output);
        return ok(vec![
            ("steps", "1".to_string()),
            ("improvement", st.improvement.decision.to_string()),
            (
                "counts",
                format!("{}/{}", st.verification.counts.0, st.verification.counts.1),
            ),
            ("card", st.output.card().to_string()),
            ("env", st.output.env().to_string()),
        ]);
    }
    let run = densify_iterate(&set, &system, &opts, a.max_steps, limits)?;
    for (i, st) in run.steps.iter().enumerate() {
        step_report(rep, i, st);
    }
    rep.line(format!("continuation {}", comparison(&run.continuation)));
    rep.line(format!("stop {}", run.stop));
    if let Some(d) = &run.stop_detail {
        rep.line(format!("# stop_detail {d}"));
    }
    let last = run.steps.last().map_or(&set, |st| &st.output);
    emit_set(rep, last);
    ok(vec![
        ("steps", run.steps.len().to_string()),
        ("stop", run.stop.to_string()),
        ("target_reached", yes_no(run.target_reached())),
        ("card", last.card().to_string()),
        ("env", last.env().to_string()),
    ])
}

fn step_report(rep: &mut Report, i: usize, st: &DensifyStep) {
    rep.line(step_line(i, st));
    rep.line(format!("  precondition {}", comparison(&st.precondition)));
    rep.line(format!("  improvement {}", comparison(&st.improvement)));
    let v = &st.verification;
    rep.line(format!(
        "  verification level={} counts={}/{} samples={}",
        v.level, v.counts.0, v.counts.1, v.samples_checked
    ));
}

fn emit_set(rep: &mut Report, set: &IntSet) {
    if set.card() <= 4096 {
        rep.block("final_set", &set.to_text());
    } else {
        rep.line(format!("# final set omitted, card {}", set.card()));
    }
}

fn count(a: &CountArgs, limits: &Limits, rep: &mut Report) -> Run {
    let set = load_set(&a.set)?;
    let phis = match &a.phi {
        Some(path) => {
            let sys = load_system(path)?;
            if sys.num_vars() != 1 {
                return Err(input(format!("{}: φ file must declare `vars 1`", path.display())));
            }
            sys.polys().to_vec()
        }
        None => power_phis(a.k.expect("clap requires k without phi")),
    };
    let j = if a.oracle {
        count_j_phi_oracle(&set, a.s, &phis, limits)?
    } else {
        count_j_phi(&set, a.s, &phis, limits)?
    };
    let k = phis.len() as u32;
    rep.line(format!(
        "J card={} s={} k={} method={} value={j}",
        set.card(),
        a.s,
        k,
        if a.oracle { "direct" } else { "moment_tally" }
    ));
    let b = bound_report(&set, a.s, k, j, a.epsilon, limits);
    rep.line(format!(
        "trivial {} <= J <= {} holds={}",
        b.lower,
        b.upper,
        yes_no(b.trivial_holds)
    ));
    rep.line(format!(
        "main_term_shape epsilon={} value={:.6e}",
        b.epsilon, b.main_term_shape
    ));
    if a.phi.is_none() {
        match b.consecutive_j {
            Some(c) => rep.line(format!("consecutive J={c} J_at_most_consecutive={}", yes_no(j <= c))),
            None => rep.line("consecutive over budget"),
        }
    }
    ok(vec![("J", j.to_string())])
}

fn verify(a: &VerifyArgs, limits: &Limits, rep: &mut Report) -> Run {
    let set = load_set(&a.set)?;
    let system = load_system(&a.system)?;
    let map = load(&a.map, MapTable::parse_text)?;
    let (yes, kind, cex) = match map.kind() {
        MapKind::Single => {
            let v = is_freiman_iso(&map, &set, &system, limits)?;
            (
                v.is_yes(),
                "single".to_string(),
                v.counterexample().map(ToString::to_string),
            )
        }
        MapKind::TFold(t) => {
            let v = is_tfold_freiman_iso(&map, &set, &system, limits)?;
            (
                v.is_yes(),
                format!("tfold{t}"),
                v.counterexample().map(ToString::to_string),
            )
        }
    };
    rep.line(format!("map kind={kind} entries={}", map.len()));
    if let Some(c) = cex {
        rep.line(format!("counterexample {c}"));
    }
    Ok(Summary {
        outcome: if yes { Outcome::Success } else { Outcome::Negative },
        fields: vec![("iso", yes_no(yes))],
    })
}

fn minmodel(a: &MinmodelArgs, limits: &Limits, rep: &mut Report) -> Run {
    let set = load_set(&a.set)?;
    let system = load_system(&a.system)?;
    let m = exact_min_model(&set, &system, a.env_cap, limits)?;
    rep.line(format!("input card={} env={}", set.card(), set.env()));
    rep.line(format!("candidates {}", m.candidates));
    rep.block("witness", &m.witness.to_text());
    rep.block("map", &m.map.to_text());
    ok(vec![
        ("env", m.env.to_string()),
        ("candidates", m.candidates.to_string()),
    ])
}
