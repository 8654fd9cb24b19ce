//! The six subcommands: argument validation (aggregated into one report),
//! computation through the library engines, CSV/plot emission.

use crate::output::{float, write_plot_script, CsvDoc, PlotKind};
use crate::{
    CliError, CliResult, EchoArgs, KickedArgs, MomdistArgs, ScalingArgs, SweepArgs, VerifyArgs,
};
use kitaev_chain::echo::{
    peak_values, power_law_fit, time_grid, window_average, EchoEngine, EchoSeries, InitialState,
    SeriesMeta,
};
use kitaev_chain::floquet::{KickSpec, KickedEngine};
use kitaev_chain::model::{ChainSpec, Momentum};
use kitaev_chain::oracle::EchoOracle;

const VERIFY_TOLERANCE: f64 = 1e-9;

/// Collects field-level problems so a bad invocation produces one report.
#[derive(Default)]
struct Validator {
    problems: Vec<String>,
}

impl Validator {
    fn push(&mut self, msg: impl Into<String>) {
        self.problems.push(format!("  - {}", msg.into()));
    }

    fn take<T>(&mut self, result: Result<T, impl std::fmt::Display>) -> Option<T> {
        match result {
            Ok(v) => Some(v),
            Err(e) => {
                self.push(e.to_string());
                None
            }
        }
    }

    fn finish(self) -> CliResult<()> {
        if self.problems.is_empty() {
            Ok(())
        } else {
            Err(CliError::Validation(self.problems.join("\n")))
        }
    }
}

/// Parse "0.785", "pi/4", "15pi/32", "-pi/32", "2pi" into radians.
fn parse_angle(s: &str) -> Result<f64, String> {
    let t = s.trim();
    if let Some(pos) = t.find("pi") {
        let (pre, post) = (&t[..pos], &t[pos + 2..]);
        let a: f64 = match pre {
            "" | "+" => 1.0,
            "-" => -1.0,
            other => other
                .parse()
                .map_err(|_| format!("bad momentum/angle `{s}`"))?,
        };
        let b: f64 = match post.strip_prefix('/') {
            None if post.is_empty() => 1.0,
            Some(den) => den
                .parse()
                .map_err(|_| format!("bad momentum/angle `{s}`"))?,
            _ => return Err(format!("bad momentum/angle `{s}`")),
        };
        Ok(a * std::f64::consts::PI / b)
    } else {
        t.parse().map_err(|_| format!("bad momentum/angle `{s}`"))
    }
}

/// Parse a momentum and insist it is one of the chain's allowed values.
fn parse_momentum(s: &str, n: usize) -> Result<Momentum, String> {
    let k = parse_angle(s)?;
    let nearest = Momentum::nearest(n, k).map_err(|e| e.to_string())?;
    if (nearest.value(n) - k).abs() > 1e-6 {
        return Err(format!(
            "momentum `{s}` = {k} is not in the allowed set for N = {n} \
             (nearest is {}pi/{n})",
            nearest.numerator()
        ));
    }
    Ok(nearest)
}

fn momentum_label(m: Momentum, n: usize) -> String {
    format!("{}pi/{}", m.numerator(), n)
}

/// `vacuum`, `uniform`, or `magnon:<m-index-or-momentum>`.
fn parse_state(s: &str, n: usize) -> Result<InitialState, String> {
    match s.trim() {
        "vacuum" => Ok(InitialState::Vacuum),
        "uniform" => Ok(InitialState::UniformSite),
        other => {
            let rest = other
                .strip_prefix("magnon:")
                .ok_or_else(|| format!("unknown state `{s}` (vacuum | magnon:<q> | uniform)"))?;
            if let Ok(m) = rest.trim().parse::<usize>() {
                if m == 0 || m > n / 4 {
                    return Err(format!("magnon mode index {m} outside 1..={}", n / 4));
                }
                let q = Momentum::from_numerator(n, 2 * m as i64 - 1).map_err(|e| e.to_string())?;
                Ok(InitialState::DefiniteMomentum(q))
            } else {
                Ok(InitialState::DefiniteMomentum(parse_momentum(rest, n)?))
            }
        }
    }
}

fn state_label(state: &InitialState, n: usize) -> String {
    match state {
        InitialState::Vacuum => "vacuum".into(),
        InitialState::UniformSite => "uniform".into(),
        InitialState::DefiniteMomentum(q) => format!("magnon:{}", momentum_label(*q, n)),
    }
}

fn require_n(v: &mut Validator, n: &Option<usize>) -> usize {
    match n {
        Some(n) => *n,
        None => {
            v.push("--n is required");
            8
        }
    }
}

fn out_flags(core: &crate::CoreArgs) -> String {
    let mut s = format!(" --workers {}", core.workers);
    if let Some(out) = &core.out {
        s.push_str(&format!(" --out {}", out.display()));
    }
    if let Some(p) = &core.plot_script {
        s.push_str(&format!(" --plot-script {}", p.display()));
    }
    s
}

fn common_params(doc: &mut CsvDoc, spec_f: &ChainSpec, h_b: f64, state: &str) {
    doc.param("n", spec_f.n_sites);
    doc.param("r", spec_f.r);
    doc.param("jx", spec_f.j_x);
    doc.param("hf", spec_f.h);
    doc.param("hb", h_b);
    doc.param("state", state);
}

fn apply_window(series: EchoSeries, window: Option<usize>) -> CliResult<EchoSeries> {
    match window {
        None => Ok(series),
        Some(w) => Ok(window_average(&series, w)?),
    }
}

fn meta(engine: &EchoEngine, state: &InitialState, grid: String) -> SeriesMeta {
    engine.series_meta(state, grid)
}

pub fn cmd_echo(args: &EchoArgs) -> CliResult<()> {
    let mut v = Validator::default();
    let n = require_n(&mut v, &args.core.n);
    if args.dt <= 0.0 {
        v.push(format!("--dt must be positive, got {}", args.dt));
    }
    if args.tmax < 0.0 {
        v.push(format!("--tmax must be nonnegative, got {}", args.tmax));
    }
    let spec_f = v.take(ChainSpec::new(n, args.core.jx, args.core.r, args.hf));
    let state = v.take(parse_state(&args.state, n));
    v.finish()?;
    let (spec_f, state) = (spec_f.unwrap(), state.unwrap());
    let spec_b = spec_f.with_field(args.hb);

    let engine = EchoEngine::new(&spec_f, &spec_b)?;
    let times = time_grid(args.tmax, args.dt);
    let values = engine.loschmidt_series(&state, &times)?;
    let grid = format!(
        "t = 0..{} step {} ({} points)",
        args.tmax,
        args.dt,
        times.len()
    );
    let series = apply_window(
        EchoSeries {
            times,
            values,
            meta: meta(&engine, &state, grid.clone()),
        },
        args.window,
    )?;

    let state_str = state_label(&state, n);
    let window_flag = args
        .window
        .map(|w| format!(" --window {w}"))
        .unwrap_or_default();
    let invocation = format!(
        "kitaev-echo echo --n {n} --r {} --jx {} --hf {} --hb {} --state {state_str} \
         --tmax {} --dt {}{window_flag}{}",
        args.core.r,
        args.core.jx,
        args.hf,
        args.hb,
        args.tmax,
        args.dt,
        out_flags(&args.core)
    );
    let mut doc = CsvDoc::new("echo", invocation, vec!["t", "L"]);
    common_params(&mut doc, &spec_f, args.hb, &state_str);
    doc.param("grid", &grid);
    if let Some(w) = args.window {
        doc.param("window", w);
    }
    for (t, l) in series.times.iter().zip(series.values.iter()) {
        doc.rows.push(vec![float(*t), float(*l)]);
    }
    doc.emit(&args.core.out)?;
    if let Some(path) = &args.core.plot_script {
        let kind = PlotKind::TimeSeries {
            xlabel: "t j_x",
            ylabel: "L(t)",
        };
        write_plot_script(path, &args.core.out, &kind, &format!("N={n} {state_str}"))?;
    }
    Ok(())
}

pub fn cmd_momdist(args: &MomdistArgs) -> CliResult<()> {
    let mut v = Validator::default();
    let n = require_n(&mut v, &args.core.n);
    let spec_f = v.take(ChainSpec::new(n, args.core.jx, args.core.r, args.hf));
    let state = v.take(parse_state(&args.state, n));
    if matches!(state, Some(InitialState::Vacuum)) {
        v.push("the vacuum carries no magnon: use --state magnon:<q> or uniform");
    }
    if args.dt <= 0.0 {
        v.push(format!("--dt must be positive, got {}", args.dt));
    }
    if args.time.is_some() && args.window.is_some() {
        v.push("--window applies to time scans only (drop --time)");
    }
    v.finish()?;
    let (spec_f, state) = (spec_f.unwrap(), state.unwrap());
    let spec_b = spec_f.with_field(args.hb);
    let engine = EchoEngine::new(&spec_f, &spec_b)?;
    let state_str = state_label(&state, n);

    if let Some(t_star) = args.time {
        // momentum scan at fixed time
        let (lo, hi) = match args.k_range.as_deref() {
            None => (-std::f64::consts::PI, std::f64::consts::PI),
            Some(rng) => match rng.split_once(':') {
                Some((a, b)) => {
                    let mut v2 = Validator::default();
                    let lo = v2.take(parse_angle(a)).unwrap_or(0.0);
                    let hi = v2.take(parse_angle(b)).unwrap_or(0.0);
                    v2.finish()?;
                    (lo, hi)
                }
                None => {
                    return Err(CliError::Validation(
                        "  - a momentum scan takes --k-range lo:hi (use a single value only \
                         for time scans)"
                            .into(),
                    ))
                }
            },
        };
        let profile = engine.dist_profile(&state, t_star)?;
        let k_flag = args
            .k_range
            .as_deref()
            .map(|kr| format!(" --k-range {kr}"))
            .unwrap_or_default();
        let invocation = format!(
            "kitaev-echo momdist --n {n} --r {} --jx {} --hf {} --hb {} --state {state_str} \
             --time {t_star}{k_flag}{}",
            args.core.r,
            args.core.jx,
            args.hf,
            args.hb,
            out_flags(&args.core)
        );
        let mut doc = CsvDoc::new("momdist", invocation, vec!["k", "P"]);
        common_params(&mut doc, &spec_f, args.hb, &state_str);
        doc.param("time", t_star);
        doc.param("k_range", format!("{lo}..{hi}"));
        for (k, p) in profile {
            let kv = k.value(n);
            if kv >= lo - 1e-12 && kv <= hi + 1e-12 {
                doc.rows.push(vec![float(kv), float(p)]);
            }
        }
        doc.emit(&args.core.out)?;
        if let Some(path) = &args.core.plot_script {
            write_plot_script(
                path,
                &args.core.out,
                &PlotKind::MomentumScan,
                &format!("N={n} {state_str} t={t_star}"),
            )?;
        }
        return Ok(());
    }

    // time scan at fixed momentum
    let k = match args.k_range.as_deref() {
        Some(s) if !s.contains(':') => {
            parse_momentum(s, n).map_err(|e| CliError::Validation(format!("  - {e}")))?
        }
        Some(_) => {
            return Err(CliError::Validation(
                "  - a time scan needs a single momentum in --k-range, not a range".into(),
            ))
        }
        None => match &state {
            InitialState::DefiniteMomentum(q) => *q,
            _ => {
                return Err(CliError::Validation(
                    "  - a time scan for the uniform state needs --k-range <momentum>".into(),
                ))
            }
        },
    };
    let times = time_grid(args.tmax, args.dt);
    let values = engine.momentum_dist_series(&state, k, &times)?;
    let grid = format!(
        "t = 0..{} step {} ({} points)",
        args.tmax,
        args.dt,
        times.len()
    );
    let series = apply_window(
        EchoSeries {
            times,
            values,
            meta: meta(&engine, &state, grid.clone()),
        },
        args.window,
    )?;
    let window_flag = args
        .window
        .map(|w| format!(" --window {w}"))
        .unwrap_or_default();
    let invocation = format!(
        "kitaev-echo momdist --n {n} --r {} --jx {} --hf {} --hb {} --state {state_str} \
         --k-range {} --tmax {} --dt {}{window_flag}{}",
        args.core.r,
        args.core.jx,
        args.hf,
        args.hb,
        momentum_label(k, n),
        args.tmax,
        args.dt,
        out_flags(&args.core)
    );
    let mut doc = CsvDoc::new("momdist", invocation, vec!["t", "P"]);
    common_params(&mut doc, &spec_f, args.hb, &state_str);
    doc.param("k", momentum_label(k, n));
    doc.param("grid", &grid);
    if let Some(w) = args.window {
        doc.param("window", w);
    }
    for (t, p) in series.times.iter().zip(series.values.iter()) {
        doc.rows.push(vec![float(*t), float(*p)]);
    }
    doc.emit(&args.core.out)?;
    if let Some(path) = &args.core.plot_script {
        let kind = PlotKind::TimeSeries {
            xlabel: "t j_x",
            ylabel: "P(k, t)",
        };
        write_plot_script(
            path,
            &args.core.out,
            &kind,
            &format!("N={n} {state_str} k={}", momentum_label(k, n)),
        )?;
    }
    Ok(())
}

fn parse_field_range(s: &str) -> Result<Vec<f64>, String> {
    let parts: Vec<&str> = s.split(':').collect();
    match parts.as_slice() {
        [one] => Ok(vec![one
            .parse()
            .map_err(|_| format!("bad field value `{s}`"))?]),
        [lo, hi, step] => {
            let lo: f64 = lo
                .parse()
                .map_err(|_| format!("bad range start in `{s}`"))?;
            let hi: f64 = hi.parse().map_err(|_| format!("bad range end in `{s}`"))?;
            let step: f64 = step
                .parse()
                .map_err(|_| format!("bad range step in `{s}`"))?;
            if step <= 0.0 || hi < lo {
                return Err(format!(
                    "range `{s}` must satisfy lo <= hi with positive step"
                ));
            }
            let count = ((hi - lo) / step).round() as usize;
            Ok((0..=count).map(|i| lo + i as f64 * step).collect())
        }
        _ => Err(format!("field range `{s}` must be `value` or `lo:hi:step`")),
    }
}

pub fn cmd_sweep(args: &SweepArgs) -> CliResult<()> {
    let mut v = Validator::default();
    let sizes = match &args.sizes {
        Some(sizes) if !sizes.is_empty() => sizes.clone(),
        _ => vec![require_n(&mut v, &args.core.n)],
    };
    let fields = v.take(parse_field_range(&args.hf)).unwrap_or_default();
    if fields.is_empty() {
        v.push("empty field range");
    }
    for &n in &sizes {
        v.take(ChainSpec::new(n, args.core.jx, args.core.r, args.hb));
    }
    v.finish()?;

    let sizes_str = sizes
        .iter()
        .map(|n| n.to_string())
        .collect::<Vec<_>>()
        .join(",");
    let invocation = format!(
        "kitaev-echo sweep --sizes {sizes_str} --r {} --jx {} --hf {} --hb {} --state {} \
         --time {}{}",
        args.core.r,
        args.core.jx,
        args.hf,
        args.hb,
        args.state,
        args.time,
        out_flags(&args.core)
    );
    let mut doc = CsvDoc::new("sweep", invocation, vec!["n", "h_f", "L"]);
    doc.param("sizes", &sizes_str);
    doc.param("r", args.core.r);
    doc.param("jx", args.core.jx);
    doc.param("hb", args.hb);
    doc.param("state", &args.state);
    doc.param("time", args.time);
    for &n in &sizes {
        let spec_b = ChainSpec::new(n, args.core.jx, args.core.r, args.hb)?;
        let state =
            parse_state(&args.state, n).map_err(|e| CliError::Validation(format!("  - {e}")))?;
        let points = kitaev_chain::echo::field_sweep(&spec_b, &fields, args.time, &state)?;
        for (h_f, l) in points {
            doc.rows.push(vec![n.to_string(), float(h_f), float(l)]);
        }
    }
    doc.emit(&args.core.out)?;
    if let Some(path) = &args.core.plot_script {
        write_plot_script(
            path,
            &args.core.out,
            &PlotKind::FieldSweep { sizes },
            &format!("t={}", args.time),
        )?;
    }
    Ok(())
}

pub fn cmd_kicked(args: &KickedArgs) -> CliResult<()> {
    let mut v = Validator::default();
    let n = require_n(&mut v, &args.core.n);
    let tau = match &args.tau {
        Some(s) => v.take(parse_angle(s)).unwrap_or(1.0),
        None => {
            v.push("--tau is required");
            1.0
        }
    };
    let base = v.take(ChainSpec::new(n, args.core.jx, args.core.r, 0.0));
    let state = v.take(parse_state(&args.state, n));
    v.finish()?;
    let (base, state) = (base.unwrap(), state.unwrap());
    let kick_f = KickSpec::new(base, tau, args.hf)?;
    let kick_b = KickSpec::new(base, tau, args.hb)?;
    let engine = KickedEngine::new(&kick_f, &kick_b)?;
    let values = engine.loschmidt_series(&state, args.kicks)?;
    let times: Vec<f64> = (0..=args.kicks).map(|i| i as f64 * tau).collect();
    let grid = format!("n = 0..{} at tau = {tau}", args.kicks);
    let state_str = state_label(&state, n);
    let series = apply_window(
        EchoSeries {
            times,
            values,
            meta: SeriesMeta {
                n_sites: n,
                j_x: base.j_x,
                r: base.r,
                h_f: args.hf,
                h_b: args.hb,
                state: state_str.clone(),
                grid: grid.clone(),
                window: None,
            },
        },
        args.window,
    )?;
    let window_flag = args
        .window
        .map(|w| format!(" --window {w}"))
        .unwrap_or_default();
    let invocation = format!(
        "kitaev-echo kicked --n {n} --r {} --jx {} --hf {} --hb {} --tau {tau} --kicks {} \
         --state {state_str}{window_flag}{}",
        args.core.r,
        args.core.jx,
        args.hf,
        args.hb,
        args.kicks,
        out_flags(&args.core)
    );
    let mut doc = CsvDoc::new("kicked", invocation, vec!["n", "t", "L"]);
    doc.param("n", n);
    doc.param("r", args.core.r);
    doc.param("jx", args.core.jx);
    doc.param("hf", args.hf);
    doc.param("hb", args.hb);
    doc.param("tau", tau);
    doc.param("kicks", args.kicks);
    doc.param("state", &state_str);
    if let Some(w) = args.window {
        doc.param("window", w);
    }
    for (t, l) in series.times.iter().zip(series.values.iter()) {
        let kick_index = (t / tau).round() as usize;
        doc.rows
            .push(vec![kick_index.to_string(), float(*t), float(*l)]);
    }
    doc.emit(&args.core.out)?;
    if let Some(path) = &args.core.plot_script {
        let kind = PlotKind::TimeSeries {
            xlabel: "kick n",
            ylabel: "L(n tau)",
        };
        write_plot_script(path, &args.core.out, &kind, &format!("N={n} tau={tau:.4}"))?;
    }
    Ok(())
}

pub fn cmd_scaling(args: &ScalingArgs) -> CliResult<()> {
    let mut v = Validator::default();
    if args.sizes.len() < 4 {
        v.push(format!(
            "--sizes needs at least 4 chain lengths, got {}",
            args.sizes.len()
        ));
    }
    for &n in &args.sizes {
        v.take(ChainSpec::new(n, args.core.jx, args.core.r, args.hf));
    }
    v.finish()?;

    let template_f = ChainSpec::new(args.sizes[0], args.core.jx, args.core.r, args.hf)?;
    let template_b = template_f.with_field(args.hb);
    let peaks: Vec<(f64, f64)> = if args.synthetic_one_over_n {
        args.sizes
            .iter()
            .map(|&n| (n as f64, 2.0 / n as f64))
            .collect()
    } else {
        peak_values(&template_f, &template_b, &args.sizes, args.time)?
    };
    let fit = power_law_fit(&peaks)?;

    let sizes_str = args
        .sizes
        .iter()
        .map(|n| n.to_string())
        .collect::<Vec<_>>()
        .join(",");
    let invocation = format!(
        "kitaev-echo scaling --sizes {sizes_str} --r {} --jx {} --hf {} --hb {} --time {}{}",
        args.core.r,
        args.core.jx,
        args.hf,
        args.hb,
        args.time,
        out_flags(&args.core)
    );
    let mut doc = CsvDoc::new("scaling", invocation, vec!["n", "peak_p"]);
    doc.param("sizes", &sizes_str);
    doc.param("r", args.core.r);
    doc.param("jx", args.core.jx);
    doc.param("hf", args.hf);
    doc.param("hb", args.hb);
    doc.param("time", args.time);
    doc.param("fit_amplitude", float(fit.amplitude));
    doc.param("fit_exponent", float(fit.exponent));
    if args.synthetic_one_over_n {
        doc.param("synthetic", "2/N injection");
    }
    for (nn, p) in &peaks {
        doc.rows.push(vec![format!("{}", *nn as usize), float(*p)]);
    }
    doc.emit(&args.core.out)?;
    if let Some(path) = &args.core.plot_script {
        let kind = PlotKind::Scaling {
            amplitude: fit.amplitude,
            exponent: fit.exponent,
        };
        write_plot_script(path, &args.core.out, &kind, &format!("t={}", args.time))?;
    }
    Ok(())
}

pub fn cmd_verify(args: &VerifyArgs) -> CliResult<()> {
    let mut v = Validator::default();
    let n = args.core.n.unwrap_or(8);
    if args.dt <= 0.0 {
        v.push(format!("--dt must be positive, got {}", args.dt));
    }
    let spec_f = v.take(ChainSpec::new(n, args.core.jx, args.core.r, args.hf));
    v.finish()?;
    let spec_f = spec_f.unwrap();
    let spec_b = spec_f.with_field(args.hb);

    // the size cap lives in the oracle; exceeding it is a validation error
    let oracle = EchoOracle::new(&spec_f, &spec_b)?;
    let engine = EchoEngine::new(&spec_f, &spec_b)?;
    let times = time_grid(args.tmax, args.dt);
    let states = [
        InitialState::Vacuum,
        InitialState::DefiniteMomentum(Momentum::from_numerator(n, 1).unwrap()),
        InitialState::UniformSite,
    ];
    let corruption = if args.corrupt { 1e-6 } else { 0.0 };

    let invocation = format!(
        "kitaev-echo verify --n {n} --r {} --jx {} --hf {} --hb {} --tmax {} --dt {}{}",
        args.core.r,
        args.core.jx,
        args.hf,
        args.hb,
        args.tmax,
        args.dt,
        out_flags(&args.core)
    );
    let mut doc = CsvDoc::new(
        "verify",
        invocation,
        vec![
            "observable",
            "state",
            "max_deviation",
            "tolerance",
            "status",
        ],
    );
    doc.param("n", n);
    doc.param("r", args.core.r);
    doc.param("grid", format!("t = 0..{} step {}", args.tmax, args.dt));
    if args.corrupt {
        doc.param(
            "corrupt",
            "engine values shifted by 1e-6 (negative control)",
        );
    }

    let mut failures = 0usize;
    for state in &states {
        let l_engine = engine.loschmidt_series(state, &times)?;
        let l_oracle = oracle.loschmidt_series(state, &times);
        let dev_l = l_engine
            .iter()
            .zip(l_oracle.iter())
            .map(|(g, w)| (g + corruption - w).abs())
            .fold(0.0f64, f64::max);
        let status_l = if dev_l <= VERIFY_TOLERANCE {
            "pass"
        } else {
            "FAIL"
        };
        failures += (status_l == "FAIL") as usize;
        let label = state_label(state, n);
        doc.rows.push(vec![
            "loschmidt".into(),
            label.clone(),
            float(dev_l),
            float(VERIFY_TOLERANCE),
            status_l.into(),
        ]);

        let p_oracle = oracle.momentum_profile_series(state, &times);
        let mut dev_p: f64 = 0.0;
        for (ti, &t) in times.iter().enumerate() {
            let profile = engine.dist_profile(state, t)?;
            for ((_, pe), (_, po)) in profile.iter().zip(p_oracle[ti].iter()) {
                dev_p = dev_p.max((pe + corruption - po).abs());
            }
        }
        let status_p = if dev_p <= VERIFY_TOLERANCE {
            "pass"
        } else {
            "FAIL"
        };
        failures += (status_p == "FAIL") as usize;
        doc.rows.push(vec![
            "momentum_dist".into(),
            label,
            float(dev_p),
            float(VERIFY_TOLERANCE),
            status_p.into(),
        ]);
    }
    doc.emit(&args.core.out)?;
    if failures > 0 {
        return Err(CliError::Verification(format!(
            "{failures} observable(s) deviate beyond {VERIFY_TOLERANCE:e} \
             at N = {n} (see report)"
        )));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn angles_parse_in_both_notations() {
        assert!((parse_angle("pi/4").unwrap() - PI / 4.0).abs() < 1e-15);
        assert!((parse_angle("-pi/32").unwrap() + PI / 32.0).abs() < 1e-15);
        assert!((parse_angle("15pi/32").unwrap() - 15.0 * PI / 32.0).abs() < 1e-15);
        assert!((parse_angle("2pi").unwrap() - 2.0 * PI).abs() < 1e-15);
        assert!((parse_angle("0.5pi").unwrap() - 0.5 * PI).abs() < 1e-15);
        assert!((parse_angle("1.25").unwrap() - 1.25).abs() < 1e-15);
        assert!(parse_angle("pie").is_err());
        assert!(parse_angle("pi/").is_err());
        assert!(parse_angle("").is_err());
    }

    #[test]
    fn momenta_must_sit_on_the_grid() {
        let k = parse_momentum("15pi/32", 32).unwrap();
        assert_eq!(k.numerator(), 15);
        let k = parse_momentum("-pi/32", 32).unwrap();
        assert_eq!(k.numerator(), -1);
        // pi/3 is never an allowed momentum of a multiple-of-four chain
        assert!(parse_momentum("pi/3", 32).is_err());
        assert!(parse_momentum("0.0979", 32).is_err()); // close to pi/32 but off grid
    }

    #[test]
    fn states_parse_by_index_or_momentum() {
        assert_eq!(parse_state("vacuum", 32).unwrap(), InitialState::Vacuum);
        assert_eq!(parse_state("uniform", 32).unwrap(), InitialState::UniformSite);
        match parse_state("magnon:3", 32).unwrap() {
            InitialState::DefiniteMomentum(q) => assert_eq!(q.numerator(), 5),
            other => panic!("{other:?}"),
        }
        match parse_state("magnon:-pi/32", 32).unwrap() {
            InitialState::DefiniteMomentum(q) => assert_eq!(q.numerator(), -1),
            other => panic!("{other:?}"),
        }
        assert!(parse_state("magnon:0", 32).is_err());
        assert!(parse_state("magnon:9", 32).is_err()); // only 8 modes at N=32
        assert!(parse_state("polarized", 32).is_err());
    }

    #[test]
    fn field_ranges_expand_inclusively() {
        assert_eq!(parse_field_range("0.5").unwrap(), vec![0.5]);
        let r = parse_field_range("-1:1:0.5").unwrap();
        assert_eq!(r.len(), 5);
        assert!((r[0] + 1.0).abs() < 1e-15 && (r[4] - 1.0).abs() < 1e-15);
        assert!(parse_field_range("1:0:0.5").is_err());
        assert!(parse_field_range("0:1:-0.5").is_err());
        assert!(parse_field_range("a:b").is_err());
    }
}
