use std::path::Path;

use serde_json::json;
use tanglefloer::chain::{
    dump, equivariant_boundary, quotient_boundary, Analysis, Orientation, SignKind, Variant,
};
use tanglefloer::classify::{validate, ValidationReport};
use tanglefloer::grading::validate_grading;
use tanglefloer::homology::{
    cohomology_of, homology_of, laurent_homology, rank_growth_check, zeta_sequence, Homology,
};
use tanglefloer::moves::{
    apply_move, classify_move, invariance_check, parse_script, primary_move_maps, MoveKind,
};
use tanglefloer::tracer::{builtin_map, self_convergence, trace, TraceParams};
use tanglefloer::{tgl, Tangle};

use crate::{
    machine, sketch, Command, Failure, MapName, Orient, Output, Signs, VariantArg, EXIT_THEOREM,
    EXIT_VALIDATION,
};

type Res<T = ()> = std::result::Result<T, Failure>;

pub fn name(c: &Command) -> &'static str {
    match c {
        Command::Validate { .. } => "validate",
        Command::Homology { .. } => "homology",
        Command::Semi { .. } => "semi",
        Command::Chaotic { .. } => "chaotic",
        Command::Zeta { .. } => "zeta",
        Command::Cohomology { .. } => "cohomology",
        Command::Iterate { .. } => "iterate",
        Command::Move { .. } => "move",
        Command::Invariance { .. } => "invariance",
        Command::Trace { .. } => "trace",
        Command::Sketch { .. } => "sketch",
    }
}

pub fn dispatch(c: &Command, out: &mut Output) -> Res {
    match c {
        Command::Validate { file } => validate_cmd(file, out),
        Command::Homology {
            file,
            signs,
            orient,
            power,
            dump,
            equivariant,
        } => homology_cmd(file, sign_kind(*signs, *orient), *power, *dump, *equivariant, out),
        Command::Semi { file, power, dump } => {
            quotient_cmd(file, Variant::SemiPrimary, SignKind::M, *power, *dump, out)
        }
        Command::Chaotic { file, power, dump } => {
            quotient_cmd(file, Variant::Chaotic, SignKind::Nu, *power, *dump, out)
        }
        Command::Zeta { file, terms } => zeta_cmd(file, *terms, out),
        Command::Cohomology {
            file,
            variant,
            signs,
            orient,
        } => cohomology_cmd(file, *variant, sign_kind(*signs, *orient), out),
        Command::Iterate {
            file,
            power,
            variant,
            emit,
        } => iterate_cmd(file, *power, *variant, *emit, out),
        Command::Move { file, script, out: dest } => move_cmd(file, script, dest.as_deref(), out),
        Command::Invariance { before, after } => invariance_cmd(before, after, out),
        Command::Trace {
            map,
            tau,
            eps,
            budget,
            lmax,
            thetamax,
            window,
            converge,
            out: dest,
        } => {
            let mut p = TraceParams::default();
            p.growth.budget = *budget;
            p.growth.l_max = *lmax;
            p.growth.theta_max = *thetamax;
            p.window = *window;
            trace_cmd(*map, *tau, *eps, &p, *converge, dest.as_deref(), out)
        }
        Command::Sketch { file, out: dest, width } => {
            let t = load(file)?;
            let svg = sketch::render_svg(&t, *width);
            write_or_print(dest.as_deref(), &svg, out)?;
            out.machine = Some(json!({
                "command": "sketch",
                "geometry": t.geometry.is_some(),
                "bytes": svg.len(),
            }));
            Ok(())
        }
    }
}

fn read(path: &Path) -> Res<String> {
    std::fs::read_to_string(path)
        .map_err(|e| Failure::new(crate::EXIT_FORMAT, format!("{}: {e}", path.display())))
}

fn load(path: &Path) -> Res<Tangle> {
    let text = read(path)?;
    tgl::parse(&text).map_err(|e| {
        let mut f = Failure::from(e);
        f.message = format!("{}: {}", path.display(), f.message);
        f
    })
}

fn write_or_print(dest: Option<&Path>, text: &str, out: &mut Output) -> Res {
    match dest {
        Some(p) => std::fs::write(p, text)
            .map_err(|e| Failure::new(crate::EXIT_FORMAT, format!("{}: {e}", p.display()))),
        None => {
            out.text.push_str(text);
            Ok(())
        }
    }
}

fn analysis(path: &Path, power: i64) -> Res<Analysis> {
    let a = Analysis::new(load(path)?)?;
    Ok(if power == 1 { a } else { a.iterate(power)? })
}

fn orientation(o: Orient) -> Orientation {
    match o {
        Orient::UPlus => Orientation::UPlus,
        Orient::UMinus => Orientation::UMinus,
        Orient::SPlus => Orientation::SPlus,
        Orient::SMinus => Orientation::SMinus,
    }
}

fn sign_kind(s: Signs, o: Orient) -> SignKind {
    match s {
        Signs::M => SignKind::M,
        Signs::N => SignKind::N(orientation(o)),
    }
}

fn sign_name(k: SignKind) -> String {
    match k {
        SignKind::M => "m".into(),
        SignKind::N(o) => format!(
            "n({})",
            match o {
                Orientation::UPlus => "u+",
                Orientation::UMinus => "u-",
                Orientation::SPlus => "s+",
                Orientation::SMinus => "s-",
            }
        ),
        SignKind::Nu => "nu".into(),
    }
}

fn variant(v: VariantArg) -> (Variant, SignKind) {
    match v {
        VariantArg::Primary => (Variant::Primary, SignKind::M),
        VariantArg::Semi => (Variant::SemiPrimary, SignKind::M),
        VariantArg::Chaotic => (Variant::Chaotic, SignKind::Nu),
    }
}

fn lines(h: &Homology, out: &mut Output) {
    for l in h.report_lines() {
        out.line(l);
    }
}

fn validate_cmd(file: &Path, out: &mut Output) -> Res {
    let t = load(file)?;
    let v = validate(&t);
    out.line(format!(
        "surface {} orientation {} window {} points {} orbits {}",
        t.surface.name(),
        t.orientation.name(),
        t.window,
        t.len(),
        t.orbits().len()
    ));
    let mut errors = v.errors.clone();
    let graded = Analysis::new(t.clone());
    match &graded {
        Ok(a) => errors.extend(validate_grading(&a.tangle, &a.class, &a.grading).findings().cloned()),
        Err(e) => errors.push(e.to_string()),
    }
    let mut orbits = Vec::new();
    for (o, c) in &v.classification.by_orbit {
        let mu = graded.as_ref().ok().and_then(|a| a.grading.mu.get(o).copied());
        let mu_text = mu.map_or("?".to_string(), |m| m.to_string());
        out.line(format!("orbit {o}: {} mu={mu_text}", c.kind()));
        orbits.push(json!({ "orbit": o, "kind": c.kind().to_string(), "mu": mu }));
    }
    let pairs: Vec<String> = ValidationReport::contractible_pairs(&t).iter().map(|b| b.to_string()).collect();
    out.line(format!("csi: {} (pairs: {})", if v.csi { "yes" } else { "no" }, pairs.join(" ")));
    for w in &v.warnings {
        out.line(format!("warning: {w}"));
    }
    for e in &errors {
        out.line(format!("error: {e}"));
    }
    out.line(if errors.is_empty() { "valid" } else { "invalid" });
    if !errors.is_empty() {
        out.exit_code = EXIT_VALIDATION;
    }
    out.machine = Some(json!({
        "command": "validate",
        "valid": errors.is_empty(),
        "errors": errors,
        "warnings": v.warnings,
        "csi": v.csi,
        "pairs": pairs,
        "orbits": orbits,
    }));
    Ok(())
}

fn homology_cmd(file: &Path, kind: SignKind, power: i64, dumped: bool, equivariant: bool, out: &mut Output) -> Res {
    let a = analysis(file, power)?;
    let c = quotient_boundary(&a, Variant::Primary, kind)?;
    if dumped {
        out.text.push_str(&dump(&c));
    }
    let h = homology_of(&c)?;
    lines(&h, out);
    let mut block = json!({
        "command": "homology",
        "variant": "primary",
        "signs": sign_name(kind),
        "power": power,
        "homology": machine::homology(&h),
    });
    if equivariant {
        let e = equivariant_boundary(&a)?;
        if dumped {
            out.text.push_str(&dump(&e));
        }
        let lh = laurent_homology(&e)?;
        for (k, m) in lh.iter().rev() {
            out.line(format!("h_{k} = {m}"));
        }
        block["equivariant"] = machine::laurent(&lh);
    }
    out.machine = Some(block);
    Ok(())
}

fn quotient_cmd(file: &Path, v: Variant, kind: SignKind, power: i64, dumped: bool, out: &mut Output) -> Res {
    let a = analysis(file, power)?;
    let c = quotient_boundary(&a, v, kind)?;
    if dumped {
        out.text.push_str(&dump(&c));
    }
    let h = homology_of(&c)?;
    lines(&h, out);
    out.machine = Some(json!({
        "command": if v == Variant::Chaotic { "chaotic" } else { "semi" },
        "variant": v.to_string(),
        "signs": sign_name(kind),
        "power": power,
        "homology": machine::homology(&h),
    }));
    Ok(())
}

fn zeta_cmd(file: &Path, terms: usize, out: &mut Output) -> Res {
    let a = analysis(file, 1)?;
    let z = zeta_sequence(&a, terms)?;
    for (n, h) in z.homologies.iter().enumerate() {
        let groups: Vec<String> = h.report_lines();
        out.line(format!("n={}: {} (chi {})", n + 1, groups.join(", "), z.chi[n]));
    }
    let chi: Vec<String> = z.chi.iter().map(|c| c.to_string()).collect();
    let series: Vec<String> = z.series.iter().map(|c| c.to_string()).collect();
    out.line(format!("chi = ({})", chi.join(", ")));
    out.line(format!("zeta = ({})", series.join(", ")));
    out.machine = Some(json!({
        "command": "zeta",
        "chi": z.chi,
        "series": series,
        "homology": z.homologies.iter().map(machine::homology).collect::<Vec<_>>(),
    }));
    Ok(())
}

fn cohomology_cmd(file: &Path, v: VariantArg, kind: SignKind, out: &mut Output) -> Res {
    let a = analysis(file, 1)?;
    let (var, default_kind) = variant(v);
    let kind = if var == Variant::Primary { kind } else { default_kind };
    let h = cohomology_of(&a, var, kind)?;
    for (k, g) in h.groups.iter().rev() {
        out.line(format!("H^{k} = {}", h.format_group(g)));
    }
    out.machine = Some(json!({
        "command": "cohomology",
        "variant": var.to_string(),
        "signs": sign_name(kind),
        "cohomology": machine::homology(&h),
    }));
    Ok(())
}

fn iterate_cmd(file: &Path, n: i64, v: VariantArg, emit: bool, out: &mut Output) -> Res {
    let a = analysis(file, 1)?;
    if emit {
        out.text.push_str(&tgl::emit(&a.tangle.iterate(n)?));
        return Ok(());
    }
    let (var, kind) = variant(v);
    let r = rank_growth_check(&a, n, var, kind)?;
    out.line("phi:");
    lines(&r.base, out);
    out.line(format!("phi^{n}:"));
    lines(&r.iterated, out);
    out.line("rank growth: ok");
    out.machine = Some(json!({
        "command": "iterate",
        "variant": var.to_string(),
        "power": n,
        "base": machine::homology(&r.base),
        "iterated": machine::homology(&r.iterated),
    }));
    Ok(())
}

fn move_cmd(file: &Path, script: &Path, dest: Option<&Path>, out: &mut Output) -> Res {
    let mut cur = load(file)?;
    let specs = parse_script(&read(script)?).map_err(|e| {
        let mut f = Failure::from(e);
        f.message = format!("{}: {}", script.display(), f.message);
        f
    })?;
    let mut report = Vec::new();
    let mut violations = Vec::new();
    let mut summary = String::new();
    for (i, spec) in specs.iter().enumerate() {
        let next = apply_move(&cur, spec)?;
        let c = classify_move(&cur, &next)?;
        let inv = invariance_check(&cur, &next)?;
        let mut status = if inv.invariant() { "invariant" } else { "changed" }.to_string();
        if c.kind == MoveKind::Primary {
            let maps = if next.len() > cur.len() {
                primary_move_maps(&cur, &next)?
            } else {
                primary_move_maps(&next, &cur)?
            };
            if !maps.failures.is_empty() {
                violations.push(format!("move {}: {}", i + 1, maps.failures.join("; ")));
            }
        }
        if !inv.invariant() {
            if inv.csi.0 && inv.csi.1 {
                violations.push(format!("move {}: homology changed between csi tangles", i + 1));
            } else {
                status.push_str(" (not csi)");
            }
        }
        summary.push_str(&format!(
            "move {}: {} pair ({}, {}) {status}\n",
            i + 1,
            c.kind,
            c.pair.0,
            c.pair.1
        ));
        report.push(json!({
            "move": spec.to_string(),
            "kind": c.kind.to_string(),
            "pair": [c.pair.0, c.pair.1],
            "flipped": c.flipped,
            "invariant": inv.invariant(),
            "csi": [inv.csi.0, inv.csi.1],
            "homology": machine::homology(&inv.after),
        }));
        cur = next;
    }
    let text = tgl::emit(&cur);
    if dest.is_some() {
        out.text.push_str(&summary);
    } else {
        out.diagnostics.push_str(&summary);
    }
    write_or_print(dest, &text, out)?;
    out.machine = Some(json!({ "command": "move", "moves": report }));
    if !violations.is_empty() {
        return Err(Failure::new(EXIT_THEOREM, violations.join("; ")));
    }
    Ok(())
}

fn invariance_cmd(before: &Path, after: &Path, out: &mut Output) -> Res {
    let (a, b) = (load(before)?, load(after)?);
    let r = invariance_check(&a, &b)?;
    out.line("before:");
    lines(&r.before, out);
    out.line("after:");
    lines(&r.after, out);
    if let Some(c) = &r.classification {
        out.line(format!("move: {} pair ({}, {})", c.kind, c.pair.0, c.pair.1));
    }
    if let Some(same) = r.boundaries_identical {
        out.line(format!("boundaries identical: {}", if same { "yes" } else { "no" }));
    }
    out.line(format!("invariant: {}", if r.invariant() { "yes" } else { "no" }));
    out.machine = Some(json!({
        "command": "invariance",
        "before": machine::homology(&r.before),
        "after": machine::homology(&r.after),
        "csi": [r.csi.0, r.csi.1],
        "move": r.classification.as_ref().map(|c| c.kind.to_string()),
        "boundaries_identical": r.boundaries_identical,
        "invariant": r.invariant(),
    }));
    if !r.invariant() {
        out.exit_code = EXIT_THEOREM;
    }
    Ok(())
}

fn trace_cmd(
    map: MapName,
    tau: f64,
    eps: f64,
    p: &TraceParams,
    converge: Option<usize>,
    dest: Option<&Path>,
    out: &mut Output,
) -> Res {
    let name = match map {
        MapName::Henon => "henon",
    };
    let m = builtin_map(name, &[tau, eps])?;
    let r = trace(m.as_ref(), (0.0, 0.0), p)?;
    let t = &r.tangle;
    let mut summary = Vec::new();
    let (fx, fy) = r.fixed_point.point;
    summary.push(format!(
        "map {} fixed point ({fx:.12}, {fy:.12}) eigenvalues {:.12} {:.12}",
        m.name(),
        r.fixed_point.eigenvalues.0,
        r.fixed_point.eigenvalues.1
    ));
    summary.push(format!(
        "crossings {} orbits {} window {} dropped {}",
        r.crossings.len(),
        t.orbits().len(),
        t.window,
        r.dropped
    ));
    for (b, s) in &r.truncated {
        summary.push(format!("branch {} stopped at arclength {s:.6}: resolution limit", b.name()));
    }
    let v = validate(t);
    let pairs: Vec<String> = ValidationReport::contractible_pairs(t).iter().map(|b| b.to_string()).collect();
    summary.push(format!("intersecting branch pairs {} ({})", pairs.len(), pairs.join(" ")));
    let mut block = json!({
        "command": "trace",
        "map": name,
        "tau": tau,
        "eps": eps,
        "crossings": r.crossings.len(),
        "orbits": t.orbits().len(),
        "window": t.window,
        "pairs": pairs,
        "truncated": r.truncated.iter().map(|(b, s)| json!({ "branch": b.name(), "arclength": s })).collect::<Vec<_>>(),
        "valid": v.is_ok(),
    });
    let mut failure = None;
    if !v.is_ok() {
        summary.extend(v.errors.iter().map(|e| format!("error: {e}")));
        failure = Some(Failure::new(EXIT_VALIDATION, "extracted tangle is invalid"));
    } else {
        match Analysis::new(t.clone()).and_then(|a| homology_of(&quotient_boundary(&a, Variant::Primary, SignKind::M)?)) {
            Ok(h) => {
                summary.extend(h.report_lines());
                block["homology"] = machine::homology(&h);
            }
            Err(e) => summary.push(format!("homology unavailable: {e}")),
        }
    }
    if let Some(levels) = converge {
        let c = self_convergence(m.as_ref(), (0.0, 0.0), p, levels)?;
        for (l, d) in c.levels.iter().skip(1).zip(&c.changes) {
            summary.push(format!("l_max {l:e}: max change {d:.3e}"));
        }
        let f = c.factor();
        summary.push(format!("convergence factor {f}"));
        block["convergence"] = json!({
            "levels": c.levels,
            "changes": c.changes,
            "factor": if f.is_finite() { json!(f) } else { json!(f.to_string()) },
        });
    }
    let summary = summary.join("\n") + "\n";
    if dest.is_some() {
        out.text.push_str(&summary);
    } else {
        out.diagnostics.push_str(&summary);
    }
    out.machine = Some(block);
    if let Some(f) = failure {
        return Err(f);
    }
    write_or_print(dest, &tgl::emit(t), out)
}
