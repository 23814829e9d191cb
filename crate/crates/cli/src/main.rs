//! `gluecoeff`: exact gluing-coefficient computations and batch identity
//! verification. JSON reports go to standard output, diagnostics to the
//! error stream. Exit code 0 means success with every check passing, 1 a
//! verification failure, 2 a usage error.

mod ends;
mod report;
mod verify;

use std::sync::atomic::{AtomicUsize, Ordering};

use anyhow::{bail, Result};
use clap::{Parser, Subcommand};
use serde_json::json;

use gluecoeff_core::coefficients::{
    c_hyperbolic, c_hyperbolic_brute, c_theta_with_cap, f_theta, f_theta_via_trees_with_cap,
    glue_count, GluingInput,
};
use gluecoeff_core::cokernel_combinatorics::{
    branched_cover_index, cz_index, f_via_determinants_with_cap,
};
use gluecoeff_core::partitions::{
    enumerate_theta_decompositions, ge_theta, ge_theta_ops, incoming_partition,
    incoming_partition_lattice, orbit_partitions, outgoing_partition,
    outgoing_partition_lattice, partition_factorial, Partition,
};
use gluecoeff_core::partitions::OrbitKind;
use gluecoeff_core::theta_core::{kappa, EndData};
use gluecoeff_core::trees::{
    canonical_pairing, enumerate_end_set_families_with_cap, enumerate_trees_with_cap,
    is_admissible, phi, weight,
};

use ends::{end_data_text, parse_end_data, parse_orbit, parse_parts, parse_theta};
use report::{check, Check, Report};
use verify::{run_suites, VerifyConfig};

#[derive(Parser)]
#[command(
    name = "gluecoeff",
    version,
    about = "Exact gluing coefficients of branched covers of cylinders, with batch verification"
)]
struct Cli {
    /// Output format: plain | json
    #[arg(long, global = true, default_value = "plain")]
    output: String,

    /// Node budget for decomposition searches and order closures
    #[arg(long, global = true, default_value_t = 50_000_000)]
    enum_node_cap: usize,

    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Coefficient of one orbit's end data, or a signed multi-orbit product
    Coeff {
        /// Angle p/q, for elliptic end data
        #[arg(long)]
        theta: Option<String>,

        /// End data `a1,..[;ap1,..] | b1,..[;bp1,..]`
        #[arg(long = "S")]
        s: Option<String>,

        /// Orbit kind for --S: elliptic | pos | neg
        #[arg(long, default_value = "elliptic")]
        kind: String,

        /// Rotation of the hyperbolic return map (even for pos, odd for neg)
        #[arg(long)]
        rotation: Option<i64>,

        /// Orbit descriptor kind:parameter:ends; repeat for multi-orbit gluings
        #[arg(long = "orbit", conflicts_with = "s")]
        orbits: Vec<String>,

        /// Sign of the upper breaking curve, +1 or -1
        #[arg(long, default_value_t = 1, allow_hyphen_values = true)]
        eps_plus: i8,

        /// Sign of the lower breaking curve, +1 or -1
        #[arg(long, default_value_t = 1, allow_hyphen_values = true)]
        eps_minus: i8,
    },

    /// One count, three ways: subset recursion, tree sum, determinant sum
    F {
        /// Angle p/q
        #[arg(long)]
        theta: String,

        /// Unprimed end data `a1,.. | b1,..`
        #[arg(long = "S")]
        s: String,
    },

    /// Extremal incoming/outgoing partitions of M and their factorials
    Partition {
        /// Angle p/q, for the elliptic kind
        #[arg(long)]
        theta: Option<String>,

        /// Total multiplicity
        #[arg(long = "M")]
        m: u64,

        /// Orbit kind: elliptic | pos | neg
        #[arg(long, default_value = "elliptic")]
        kind: String,

        /// Rotation of the hyperbolic return map
        #[arg(long)]
        rotation: Option<i64>,
    },

    /// Partial-order comparison of two partitions, by both definitions
    Order {
        /// Angle p/q
        #[arg(long)]
        theta: String,

        /// First partition, comma-separated
        #[arg(long = "P")]
        p: String,

        /// Second partition, comma-separated
        #[arg(long = "Q")]
        q: String,
    },

    /// Tree census for unprimed end data, with weights
    Trees {
        /// Angle p/q
        #[arg(long)]
        theta: String,

        /// Unprimed end data `a1,.. | b1,..`
        #[arg(long = "S")]
        s: String,

        /// List every trivalent tree with its admissibility and weight
        #[arg(long)]
        dump_trees: bool,
    },

    /// Decomposition classes of end data into balanced components
    Decompose {
        /// Angle p/q
        #[arg(long)]
        theta: String,

        /// End data `a1,..[;ap1,..] | b1,..[;bp1,..]`
        #[arg(long = "S")]
        s: String,
    },

    /// Indices: of an m-fold orbit cover, or of a branched cover with given ends
    Index {
        /// Angle p/q, for the elliptic kind
        #[arg(long)]
        theta: Option<String>,

        /// Orbit kind: elliptic | pos | neg
        #[arg(long, default_value = "elliptic")]
        kind: String,

        /// Rotation of the hyperbolic return map
        #[arg(long)]
        rotation: Option<i64>,

        /// Cover multiplicity whose end index to report
        #[arg(long = "m")]
        m: Option<u64>,

        /// Genus of the covering surface
        #[arg(long, default_value_t = 0)]
        genus: u64,

        /// Unprimed end data `a1,.. | b1,..` of the branched cover
        #[arg(long = "S")]
        s: Option<String>,
    },

    /// Batch identity verification over capped sweeps
    Verify {
        /// Suite name, repeatable; `all` (the default) runs every suite
        #[arg(long)]
        suite: Vec<String>,

        /// Largest total multiplicity in any sweep
        #[arg(long = "max-M", default_value_t = 8)]
        max_m: u64,

        /// Largest number of ends in any enumerated instance
        #[arg(long = "max-N", default_value_t = 6)]
        max_n: usize,

        /// Seed for the generated angle sweep
        #[arg(long, default_value_t = 0)]
        seed: u64,

        /// Extra sweep angle p/q; repeatable
        #[arg(long = "theta")]
        thetas: Vec<String>,
    },
}

fn main() {
    let cli = Cli::parse();
    if let Ok(v) = std::env::var("GLUECOEFF_THREADS") {
        match v.parse::<usize>() {
            Ok(n) if n >= 1 => {
                rayon::ThreadPoolBuilder::new()
                    .num_threads(n)
                    .build_global()
                    .ok();
            }
            _ => {
                eprintln!("error: GLUECOEFF_THREADS must be a positive integer, got `{v}`");
                std::process::exit(2);
            }
        }
    }
    match run(cli) {
        Ok(code) => std::process::exit(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            std::process::exit(2);
        }
    }
}

fn run(cli: Cli) -> Result<i32> {
    let as_json = match cli.output.as_str() {
        "json" => true,
        "plain" => false,
        other => bail!("unknown output format `{other}`; use plain or json"),
    };
    let cap = cli.enum_node_cap;
    let report = match cli.command {
        Cmd::Coeff {
            theta,
            s,
            kind,
            rotation,
            orbits,
            eps_plus,
            eps_minus,
        } => cmd_coeff(theta, s, kind, rotation, orbits, eps_plus, eps_minus, cap)?,
        Cmd::F { theta, s } => cmd_f(theta, s, cap)?,
        Cmd::Partition {
            theta,
            m,
            kind,
            rotation,
        } => cmd_partition(theta, m, kind, rotation)?,
        Cmd::Order { theta, p, q } => cmd_order(theta, p, q, cap)?,
        Cmd::Trees {
            theta,
            s,
            dump_trees,
        } => cmd_trees(theta, s, dump_trees, cap)?,
        Cmd::Decompose { theta, s } => cmd_decompose(theta, s, cap)?,
        Cmd::Index {
            theta,
            kind,
            rotation,
            m,
            genus,
            s,
        } => cmd_index(theta, kind, rotation, m, genus, s)?,
        Cmd::Verify {
            suite,
            max_m,
            max_n,
            seed,
            thetas,
        } => cmd_verify(suite, max_m, max_n, seed, thetas, cap)?,
    };
    report.print(as_json);
    Ok(report.exit_code())
}

// kind/rotation flags to an orbit classification; elliptic defers to theta
fn hyperbolic_kind(kind: &str, rotation: Option<i64>) -> Result<Option<OrbitKind>> {
    match kind {
        "elliptic" => Ok(None),
        "pos" => Ok(Some(OrbitKind::positive_hyperbolic(rotation.unwrap_or(2))?)),
        "neg" => Ok(Some(OrbitKind::negative_hyperbolic(rotation.unwrap_or(1))?)),
        other => bail!("unknown orbit kind `{other}`; use elliptic, pos, or neg"),
    }
}

#[allow(clippy::too_many_arguments)]
fn cmd_coeff(
    theta: Option<String>,
    s: Option<String>,
    kind: String,
    rotation: Option<i64>,
    orbits: Vec<String>,
    eps_plus: i8,
    eps_minus: i8,
    cap: usize,
) -> Result<Report> {
    if !orbits.is_empty() {
        if theta.is_some() || rotation.is_some() {
            bail!("--orbit descriptors carry their own parameters; drop --theta/--rotation");
        }
        let parsed: Vec<_> = orbits
            .iter()
            .map(|o| parse_orbit(o))
            .collect::<Result<_>>()?;
        let input = GluingInput {
            orbits: parsed.clone(),
            eps_plus,
            eps_minus,
        };
        let value = glue_count(&input)?;
        let mut checks = Vec::new();
        for (i, orbit) in parsed.iter().enumerate() {
            if let OrbitKind::Elliptic(t) = orbit.kind {
                let fwd = EndData::new(
                    orbit.a.clone(),
                    orbit.a_prime.clone(),
                    orbit.b.clone(),
                    orbit.b_prime.clone(),
                )?;
                let rev = EndData::new(
                    orbit.b.clone(),
                    orbit.b_prime.clone(),
                    orbit.a.clone(),
                    orbit.a_prime.clone(),
                )?;
                let pass =
                    c_theta_with_cap(t, &fwd, cap)? == c_theta_with_cap(t.negate(), &rev, cap)?;
                checks.push(check(
                    format!("orbit {} symmetric under angle negation", i + 1),
                    pass,
                ));
            }
        }
        return Ok(Report {
            command: "coeff",
            inputs: json!({
                "orbits": orbits,
                "eps_plus": eps_plus,
                "eps_minus": eps_minus,
            }),
            result: json!({ "value": value.to_string() }),
            checks,
            plain: format!("{value}\n"),
        });
    }

    let Some(spec) = s else {
        bail!("provide end data with --S, or orbits with --orbit");
    };
    let data = parse_end_data(&spec)?;
    match hyperbolic_kind(&kind, rotation)? {
        None => {
            let Some(tspec) = theta else {
                bail!("elliptic end data needs --theta");
            };
            let t = parse_theta(&tspec, data.total())?;
            let value = c_theta_with_cap(t, &data, cap)?;
            let rev = EndData::new(
                data.b().to_vec(),
                data.b_prime().to_vec(),
                data.a().to_vec(),
                data.a_prime().to_vec(),
            )?;
            let mirrored = c_theta_with_cap(t.negate(), &rev, cap)?;
            Ok(Report {
                command: "coeff",
                inputs: json!({
                    "theta": t.to_string(),
                    "S": end_data_text(&data),
                    "kind": "elliptic",
                    "enum_node_cap": cap,
                }),
                result: json!({ "value": value.to_string() }),
                checks: vec![check("symmetric under angle negation", value == mirrored)],
                plain: format!("{value}\n"),
            })
        }
        Some(k) => {
            if theta.is_some() {
                bail!("--theta only applies to elliptic orbits");
            }
            let plus: Vec<u64> = data.plus_side().collect();
            let minus: Vec<u64> = data.minus_side().collect();
            let value = c_hyperbolic(k, &plus, &minus)?;
            let mut checks = Vec::new();
            if data.total() <= 8 {
                checks.push(check(
                    "matches brute-force matching count",
                    value == c_hyperbolic_brute(k, &plus, &minus)?,
                ));
            }
            Ok(Report {
                command: "coeff",
                inputs: json!({
                    "S": end_data_text(&data),
                    "kind": kind,
                    "rotation": match k {
                        OrbitKind::PositiveHyperbolic { rotation } => rotation,
                        OrbitKind::NegativeHyperbolic { rotation } => rotation,
                        OrbitKind::Elliptic(_) => unreachable!(),
                    },
                }),
                result: json!({ "value": value.to_string() }),
                checks,
                plain: format!("{value}\n"),
            })
        }
    }
}

fn cmd_f(theta: String, s: String, cap: usize) -> Result<Report> {
    let data = parse_end_data(&s)?;
    if !data.a_prime().is_empty() || !data.b_prime().is_empty() {
        bail!("the count takes unprimed end data `a1,.. | b1,..`");
    }
    let t = parse_theta(&theta, data.total())?;
    let a = data.a().to_vec();
    let b = data.b().to_vec();
    let n = a.len() + b.len();
    let recursion = f_theta(t, &a, &b)?;
    let via_trees = f_theta_via_trees_with_cap(t, &a, &b, n.max(2))?;
    let via_dets = if n > 2 {
        Some(f_via_determinants_with_cap(t, &a, &b, n)?)
    } else {
        None
    };
    let mut checks = vec![check("tree sum matches recursion", via_trees == recursion)];
    if let Some(d) = &via_dets {
        checks.push(check("determinant sum matches recursion", *d == recursion));
    }
    let _ = cap;
    Ok(Report {
        command: "f",
        inputs: json!({ "theta": t.to_string(), "S": end_data_text(&data) }),
        result: json!({
            "value": recursion.to_string(),
            "recursion": recursion.to_string(),
            "via_trees": via_trees.to_string(),
            "via_determinants": via_dets.as_ref().map(|d| d.to_string()),
        }),
        checks,
        plain: format!("{recursion}\n"),
    })
}

fn cmd_partition(
    theta: Option<String>,
    m: u64,
    kind: String,
    rotation: Option<i64>,
) -> Result<Report> {
    let (pin, pout, checks, theta_text) = match hyperbolic_kind(&kind, rotation)? {
        None => {
            let Some(tspec) = theta else {
                bail!("the elliptic kind needs --theta");
            };
            let t = parse_theta(&tspec, m)?;
            let pin = incoming_partition(t, m)?;
            let pout = outgoing_partition(t, m)?;
            let pass = pin == incoming_partition_lattice(t, m)?
                && pout == outgoing_partition_lattice(t, m)?;
            (
                pin,
                pout,
                vec![check("greedy matches lattice path", pass)],
                Some(t.to_string()),
            )
        }
        Some(k) => {
            if theta.is_some() {
                bail!("--theta only applies to the elliptic kind");
            }
            let (pin, pout) = orbit_partitions(k, m)?;
            (pin, pout, Vec::new(), None)
        }
    };
    let fin = partition_factorial(&pin);
    let fout = partition_factorial(&pout);
    Ok(Report {
        command: "partition",
        inputs: json!({ "theta": theta_text, "M": m, "kind": kind }),
        result: json!({
            "incoming": pin.to_string(),
            "outgoing": pout.to_string(),
            "incoming_factorial": fin.to_string(),
            "outgoing_factorial": fout.to_string(),
        }),
        checks,
        plain: format!("in={pin}, out={pout}\nin!={fin}, out!={fout}\n"),
    })
}

fn cmd_order(theta: String, p: String, q: String, cap: usize) -> Result<Report> {
    let pp = Partition::new(parse_parts(&p)?)?;
    let qq = Partition::new(parse_parts(&q)?)?;
    let t = parse_theta(&theta, pp.total())?;
    let p_ge_q = ge_theta(t, &pp, &qq, cap)?;
    let q_ge_p = ge_theta(t, &qq, &pp, cap)?;
    let checks = vec![
        check(
            "decomposition and move closure agree on P >= Q",
            p_ge_q == ge_theta_ops(t, &pp, &qq, cap)?,
        ),
        check(
            "decomposition and move closure agree on Q >= P",
            q_ge_p == ge_theta_ops(t, &qq, &pp, cap)?,
        ),
    ];
    Ok(Report {
        command: "order",
        inputs: json!({
            "theta": t.to_string(),
            "P": pp.to_string(),
            "Q": qq.to_string(),
            "enum_node_cap": cap,
        }),
        result: json!({ "p_ge_q": p_ge_q, "q_ge_p": q_ge_p }),
        checks,
        plain: format!("P >= Q: {p_ge_q}\nQ >= P: {q_ge_p}\n"),
    })
}

fn cmd_trees(theta: String, s: String, dump_trees: bool, cap: usize) -> Result<Report> {
    let data = parse_end_data(&s)?;
    if !data.a_prime().is_empty() || !data.b_prime().is_empty() {
        bail!("tree enumeration takes unprimed end data `a1,.. | b1,..`");
    }
    let t = parse_theta(&theta, data.total())?;
    let n = data.a().len() + data.b().len();
    let leaf_cap = n.max(2);
    let trivalent = enumerate_trees_with_cap(&data, true, leaf_cap)?;
    let admissible: Vec<_> = trivalent
        .iter()
        .filter(|tree| is_admissible(tree))
        .collect();
    let families = enumerate_end_set_families_with_cap(&data, leaf_cap)?;
    let via_trees = f_theta_via_trees_with_cap(t, data.a(), data.b(), leaf_cap)?;
    let recursion = f_theta(t, data.a(), data.b())?;
    let mut checks = vec![check("tree sum matches recursion", via_trees == recursion)];
    if n > 2 {
        let images: std::collections::BTreeSet<String> = families
            .iter()
            .map(|fam| Ok(phi(fam, &data)?.canonical_key()))
            .collect::<gluecoeff_core::Result<_>>()?;
        let keys: std::collections::BTreeSet<String> = admissible
            .iter()
            .map(|tree| tree.canonical_key())
            .collect();
        checks.push(check(
            "families biject onto admissible trees",
            images.len() == families.len() && images == keys,
        ));
    }
    let mut dumped = Vec::new();
    let mut plain = format!(
        "trivalent={}, admissible={}, families={}, f={via_trees}\n",
        trivalent.len(),
        admissible.len(),
        families.len(),
    );
    if dump_trees {
        for tree in &trivalent {
            let adm = is_admissible(tree);
            let w = if adm {
                Some(weight(t, tree, &canonical_pairing(tree)?)?)
            } else {
                None
            };
            match &w {
                Some(w) => plain.push_str(&format!("  {} weight={w}\n", tree.to_text())),
                None => plain.push_str(&format!("  {} (not admissible)\n", tree.to_text())),
            }
            dumped.push(json!({
                "text": tree.to_text(),
                "admissible": adm,
                "weight": w.map(|w| w.to_string()),
            }));
        }
    }
    let mut result = json!({
        "trivalent": trivalent.len(),
        "admissible": admissible.len(),
        "families": families.len(),
        "f_via_trees": via_trees.to_string(),
        "f_recursion": recursion.to_string(),
    });
    if dump_trees {
        result["trees"] = json!(dumped);
    }
    let _ = cap;
    Ok(Report {
        command: "trees",
        inputs: json!({ "theta": t.to_string(), "S": end_data_text(&data) }),
        result,
        checks,
        plain,
    })
}

fn cmd_decompose(theta: String, s: String, cap: usize) -> Result<Report> {
    let data = parse_end_data(&s)?;
    let t = parse_theta(&theta, data.total())?;
    let k = kappa(t, &data)?;
    let classes = enumerate_theta_decompositions(t, &data, cap)?;
    let mut rendered: Vec<Vec<String>> = Vec::new();
    let mut sizes_ok = true;
    let mut balanced = true;
    for class in &classes {
        if class.components.len() as u64 != k {
            sizes_ok = false;
        }
        match class.component_data(&data) {
            Ok(comps) => rendered.push(comps.iter().map(end_data_text).collect()),
            Err(_) => balanced = false,
        }
    }
    let mut plain = format!("kappa={k}, classes={}\n", classes.len());
    for class in &rendered {
        plain.push_str(&format!("  {}\n", class.join(" + ")));
    }
    Ok(Report {
        command: "decompose",
        inputs: json!({
            "theta": t.to_string(),
            "S": end_data_text(&data),
            "enum_node_cap": cap,
        }),
        result: json!({
            "kappa": k,
            "classes": classes.len(),
            "decompositions": rendered,
        }),
        checks: vec![
            check("every class has kappa components", sizes_ok),
            check("every component balances its sides", balanced),
        ],
        plain,
    })
}

fn cmd_index(
    theta: Option<String>,
    kind: String,
    rotation: Option<i64>,
    m: Option<u64>,
    genus: u64,
    s: Option<String>,
) -> Result<Report> {
    if m.is_none() && s.is_none() {
        bail!("provide a cover multiplicity with --m or end data with --S");
    }
    let data = s.as_deref().map(parse_end_data).transpose()?;
    if let Some(d) = &data {
        if !d.a_prime().is_empty() || !d.b_prime().is_empty() {
            bail!("the cover index takes unprimed end data `a1,.. | b1,..`");
        }
    }
    let orbit = match hyperbolic_kind(&kind, rotation)? {
        Some(k) => {
            if theta.is_some() {
                bail!("--theta only applies to the elliptic kind");
            }
            k
        }
        None => {
            let Some(tspec) = theta.as_deref() else {
                bail!("the elliptic kind needs --theta");
            };
            let guard = m
                .unwrap_or(0)
                .max(data.as_ref().map_or(0, |d| d.total()));
            OrbitKind::Elliptic(parse_theta(tspec, guard)?)
        }
    };
    let cz = m.map(|m| cz_index(orbit, m)).transpose()?;
    let cover = data
        .as_ref()
        .map(|d| branched_cover_index(orbit, genus, d.a(), d.b()))
        .transpose()?;
    let mut checks = Vec::new();
    if let (Some(v), OrbitKind::Elliptic(_)) = (cz, orbit) {
        checks.push(check("elliptic end index is odd", v.rem_euclid(2) == 1));
    }
    let mut plain = String::new();
    if let Some(v) = cz {
        plain.push_str(&format!("cz = {v}\n"));
    }
    if let Some(v) = cover {
        plain.push_str(&format!("ind = {v}\n"));
    }
    let theta_text = match orbit {
        OrbitKind::Elliptic(t) => Some(t.to_string()),
        _ => None,
    };
    Ok(Report {
        command: "index",
        inputs: json!({
            "theta": theta_text,
            "kind": kind,
            "m": m,
            "genus": genus,
            "S": data.as_ref().map(end_data_text),
        }),
        result: json!({ "cz_index": cz, "branched_cover_index": cover }),
        checks,
        plain,
    })
}

fn cmd_verify(
    suites: Vec<String>,
    max_m: u64,
    max_n: usize,
    seed: u64,
    thetas: Vec<String>,
    cap: usize,
) -> Result<Report> {
    let mut extra = Vec::new();
    for spec in &thetas {
        // validated against the M cap's guard in the sweep constructor
        let t = parse_theta(spec, max_m)?;
        extra.push((t.numerator(), t.denominator()));
    }
    let cfg = VerifyConfig {
        max_m,
        max_n,
        node_cap: cap,
        seed,
        extra_thetas: extra,
    };
    let progress = AtomicUsize::new(0);
    let outcomes = run_suites(&suites, &cfg, &progress)?;
    let mut checks: Vec<Check> = Vec::new();
    let mut suites_json = Vec::new();
    let mut plain = String::new();
    for o in &outcomes {
        checks.push(check(o.name, o.failures.is_empty()));
        suites_json.push(json!({
            "name": o.name,
            "cases": o.cases,
            "failures": o.failures,
        }));
        if o.failures.is_empty() {
            plain.push_str(&format!("suite {}: {} cases, pass\n", o.name, o.cases));
        } else {
            plain.push_str(&format!(
                "suite {}: {} cases, FAIL ({} counterexamples)\n",
                o.name,
                o.cases,
                o.failures.len()
            ));
            for f in &o.failures {
                plain.push_str(&format!("  {f}\n"));
            }
        }
    }
    let total = progress.load(Ordering::Relaxed);
    let all_pass = outcomes.iter().all(|o| o.failures.is_empty());
    plain.push_str(&format!(
        "{total} cases: {}\n",
        if all_pass { "all pass" } else { "FAILURES" }
    ));
    Ok(Report {
        command: "verify",
        inputs: json!({
            "suites": outcomes.iter().map(|o| o.name).collect::<Vec<_>>(),
            "max_M": max_m,
            "max_N": max_n,
            "enum_node_cap": cap,
            "seed": seed,
            "thetas": thetas,
        }),
        result: json!({
            "suites": suites_json,
            "total_cases": total,
        }),
        checks,
        plain,
    })
}
