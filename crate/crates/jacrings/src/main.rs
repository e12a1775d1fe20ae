//! Command-line front end: suite runner, class expansion, relation export.

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use jacrings::divisors::{DivisorCalc, DivisorSpec, RelationSet};
use jacrings::jacobian::ClassSpec;
use jacrings::suites::{self, Suite, SuiteConfig};
use jacrings::syminf;
use jacrings::tower::Model;
use jacrings::{Element, Error, ModelConfig, Result};

#[derive(Parser)]
#[command(
    name = "jacrings",
    version,
    about = "Exact Chow models of a curve, its Jacobian and its symmetric powers"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run identity suites and report per-check statuses.
    Verify(VerifyArgs),
    /// Print a named class in a chosen coordinate system.
    Expand(ExpandArgs),
    /// Emit the divisor relation families for a curve with a special divisor.
    Gk(GkArgs),
}

#[derive(Args)]
struct VerifyArgs {
    /// Curve genus (1..=5).
    #[arg(long)]
    g: Option<u32>,
    /// Base dimension (0..=2).
    #[arg(long)]
    d: Option<u32>,
    /// Suite: cinf, cbullet, pd, gk, filtration or all.
    #[arg(long)]
    suite: Option<String>,
    /// Print the report as JSON instead of text.
    #[arg(long)]
    json: bool,
    /// Also write the JSON report to this path.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Cap on symmetric-power degree (window override).
    #[arg(long)]
    u_cap: Option<u32>,
    /// Seed for sampled property instances.
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Args)]
struct ExpandArgs {
    /// Class name: L, Gamma, C, Cn:k, Delta:n, GammaN:n, GammaNat:n or fa:<class>.
    #[arg(long)]
    class: String,
    /// Coordinate system: x, u or bullet.
    #[arg(long, default_value = "x")]
    coords: String,
    #[arg(long)]
    g: Option<u32>,
    #[arg(long)]
    d: Option<u32>,
    /// Print JSON instead of the display form.
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct GkArgs {
    /// Curve genus (field mode).
    #[arg(long)]
    g: Option<u32>,
    /// Degree of the divisor D = p1 + .. + p_ddeg.
    #[arg(long, default_value_t = 2)]
    ddeg: u32,
    /// Declared dimension of the linear system of D.
    #[arg(long, default_value_t = 1)]
    r: u32,
    /// Output format: json or text.
    #[arg(long, default_value = "json")]
    emit: String,
    /// Write the output to this path instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

/// Values read from the optional key=value file named by JACRINGS_CONFIG.
#[derive(Default)]
struct EnvConfig {
    g: Option<u32>,
    d: Option<u32>,
    seed: Option<u64>,
    u_cap: Option<u32>,
    suite: Option<String>,
}

fn load_env_config() -> Result<EnvConfig> {
    let mut cfg = EnvConfig::default();
    let path = match std::env::var_os("JACRINGS_CONFIG") {
        Some(p) => p,
        None => return Ok(cfg),
    };
    let text = fs::read_to_string(&path).map_err(|e| {
        Error::Config(format!(
            "cannot read JACRINGS_CONFIG file {}: {e}",
            PathBuf::from(&path).display()
        ))
    })?;
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| {
            Error::Config(format!(
                "JACRINGS_CONFIG line {}: expected key=value, got `{line}`",
                lineno + 1
            ))
        })?;
        let (key, value) = (key.trim(), value.trim());
        let bad = |e: std::num::ParseIntError| {
            Error::Config(format!("JACRINGS_CONFIG key `{key}`: {e}"))
        };
        match key {
            "g" => cfg.g = Some(value.parse().map_err(bad)?),
            "d" => cfg.d = Some(value.parse().map_err(bad)?),
            "seed" => cfg.seed = Some(value.parse().map_err(bad)?),
            "u_cap" => cfg.u_cap = Some(value.parse().map_err(bad)?),
            "suite" => cfg.suite = Some(value.to_string()),
            other => {
                return Err(Error::Config(format!(
                    "JACRINGS_CONFIG: unknown key `{other}`"
                )))
            }
        }
    }
    Ok(cfg)
}

fn usage_error(err: &Error) -> bool {
    matches!(
        err,
        Error::Config(_) | Error::Range(_) | Error::UnknownPoint(_) | Error::UnknownGenerator(_)
    )
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.cmd {
        Cmd::Verify(args) => cmd_verify(args),
        Cmd::Expand(args) => cmd_expand(args),
        Cmd::Gk(args) => cmd_gk(args),
    };
    match outcome {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            if usage_error(&e) {
                ExitCode::from(2)
            } else {
                ExitCode::from(1)
            }
        }
    }
}

fn cmd_verify(args: VerifyArgs) -> Result<ExitCode> {
    let env = load_env_config()?;
    let g = args.g.or(env.g).unwrap_or(2);
    let d = args.d.or(env.d).unwrap_or(0);
    let suite = match args.suite.or(env.suite) {
        Some(s) => Suite::parse(&s)?,
        None => Suite::All,
    };
    let mut cfg = SuiteConfig::new(g, d);
    if let Some(seed) = args.seed.or(env.seed) {
        cfg = cfg.with_seed(seed);
    }
    if let Some(cap) = args.u_cap.or(env.u_cap) {
        cfg = cfg.with_u_cap(Some(cap));
    }
    let report = suites::run(&cfg, suite)?;
    let json = serde_json::to_string_pretty(&report.to_json())
        .map_err(|e| Error::Json(e.to_string()))?;
    if args.json {
        println!("{json}");
    } else {
        println!("{}", report.render_text());
    }
    if let Some(path) = args.out {
        fs::write(&path, format!("{json}\n"))
            .map_err(|e| Error::Config(format!("cannot write {}: {e}", path.display())))?;
    }
    Ok(if report.failed() {
        ExitCode::from(1)
    } else {
        ExitCode::SUCCESS
    })
}

/// What `expand` resolved: the element plus where it naturally lives.
struct Expanded {
    element: Element,
    basis: &'static str,
}

fn class_spec_of(name: &str) -> ClassSpec {
    match name {
        "C" => ClassSpec::Curve,
        "p0" => ClassSpec::BasePoint,
        p => ClassSpec::Point(p.to_string()),
    }
}

fn parse_indexed(class: &str) -> Result<(String, Option<String>)> {
    let mut parts = class.split(':');
    let head = parts.next().unwrap_or_default().to_string();
    let arg = parts.next().map(str::to_string);
    if parts.next().is_some() {
        return Err(Error::Config(format!("malformed class name `{class}`")));
    }
    Ok((head, arg))
}

fn cmd_expand(args: ExpandArgs) -> Result<ExitCode> {
    let env = load_env_config()?;
    let g = args.g.or(env.g).unwrap_or(2);
    let d = args.d.or(env.d).unwrap_or(0);
    if !(1..=5).contains(&g) || d > 2 {
        return Err(Error::Config(format!(
            "supported range is 1 <= g <= 5 and 0 <= d <= 2, got g={g} d={d}"
        )));
    }
    let (head, arg) = parse_indexed(&args.class)?;

    let mut points: Vec<String> = Vec::new();
    if let Some(a) = &arg {
        if let ClassSpec::Point(p) = class_spec_of(a) {
            points.push(p);
        }
    }
    let m = Model::new(ModelConfig::new(g, d).with_points(points))?;
    let jac = m.jac();

    let need = |what: &str| -> Result<u32> {
        arg.as_deref()
            .and_then(|a| a.parse().ok())
            .ok_or_else(|| Error::Config(format!("class `{head}` needs a numeric index: {what}")))
    };

    enum Home {
        XCoords(Element),
        Tower(jacrings::TowerElem),
    }
    let native = match head.as_str() {
        "L" => Home::XCoords(syminf::class_l(jac)),
        "Gamma" => Home::XCoords(syminf::class_gamma(jac)?),
        "C" => Home::XCoords(syminf::class_c(jac)?),
        "Cn" => Home::XCoords(syminf::class_cn(jac, need("Cn:k")?)?),
        "fa" => {
            let spec = class_spec_of(arg.as_deref().ok_or_else(|| {
                Error::Config("class `fa` needs an argument: fa:C, fa:p0 or fa:<point>".into())
            })?);
            Home::XCoords(syminf::fa_of_spec(jac, &spec)?)
        }
        "Delta" => Home::Tower(m.delta_push(need("Delta:n")?, &ClassSpec::Curve)?),
        "GammaN" => Home::Tower(m.gamma_n(need("GammaN:n")?, &ClassSpec::Curve)?),
        "GammaNat" => Home::Tower(m.gamma_nat(need("GammaNat:n")?, &ClassSpec::Curve)?),
        other => {
            return Err(Error::Config(format!(
                "unknown class `{other}` (expected L, Gamma, C, Cn:k, Delta:n, GammaN:n, GammaNat:n or fa:<class>)"
            )))
        }
    };

    let expanded = match (native, args.coords.as_str()) {
        (Home::XCoords(el), "x") => Expanded {
            element: el,
            basis: "x",
        },
        (Home::XCoords(el), "u") => Expanded {
            element: syminf::x_to_u(jac, &el)?,
            basis: "u",
        },
        (Home::XCoords(el), "bullet") => {
            let lifted = m.r_section(&el)?;
            Expanded {
                element: lifted.el,
                basis: lifted.basis.tag(),
            }
        }
        (Home::Tower(te), "bullet") => Expanded {
            basis: te.basis.tag(),
            element: te.el,
        },
        (Home::Tower(te), "x") => Expanded {
            element: m.q_push(&te)?,
            basis: "x",
        },
        (Home::Tower(te), "u") => {
            let x = m.q_push(&te)?;
            Expanded {
                element: syminf::x_to_u(jac, &x)?,
                basis: "u",
            }
        }
        (_, other) => {
            return Err(Error::Config(format!(
                "unknown coordinate system `{other}` (expected x, u or bullet)"
            )))
        }
    };

    if args.json {
        let payload = serde_json::json!({
            "class": args.class,
            "coords": args.coords,
            "g": g,
            "d": d,
            "basis": expanded.basis,
            "element": expanded.element.to_json(),
        });
        println!(
            "{}",
            serde_json::to_string_pretty(&payload).map_err(|e| Error::Json(e.to_string()))?
        );
    } else {
        println!("{}", expanded.element);
    }
    Ok(ExitCode::SUCCESS)
}

fn render_relations(set: &RelationSet) -> String {
    let mut out = String::new();
    out.push_str(&format!(
        "g={} D={} (degree {})\n",
        set.g,
        set.divisor,
        set.divisor.degree()
    ));
    for w in &set.warnings {
        out.push_str(&format!("warning: {w}\n"));
    }
    for r in &set.relations {
        out.push_str(&format!(
            "{} [{} N={} s={} {}] {}\n",
            r.label, r.flavor, r.n, r.s, r.basis, r.el
        ));
    }
    for n in &set.notes {
        out.push_str(&format!("note: {n}\n"));
    }
    out.push_str(&format!("{} relations", set.relations.len()));
    out
}

fn cmd_gk(args: GkArgs) -> Result<ExitCode> {
    let env = load_env_config()?;
    let g = args.g.or(env.g).unwrap_or(2);
    if !(1..=5).contains(&g) {
        return Err(Error::Config(format!(
            "supported range is 1 <= g <= 5, got g={g}"
        )));
    }
    if args.ddeg == 0 {
        return Err(Error::Config("the divisor degree must be >= 1".into()));
    }
    let points: Vec<String> = (1..=args.ddeg).map(|i| format!("p{i}")).collect();
    let m = Model::new(ModelConfig::new(g, 0).with_points(points.iter().cloned()))?;
    let spec = DivisorSpec::new(points, args.r)?;
    let calc = DivisorCalc::new(&m, spec)?;
    let set = calc.emit_all()?;

    let rendered = match args.emit.as_str() {
        "json" => serde_json::to_string_pretty(&set.to_json())
            .map_err(|e| Error::Json(e.to_string()))?,
        "text" => render_relations(&set),
        other => {
            return Err(Error::Config(format!(
                "unknown emit format `{other}` (expected json or text)"
            )))
        }
    };
    match args.out {
        Some(path) => fs::write(&path, format!("{rendered}\n"))
            .map_err(|e| Error::Config(format!("cannot write {}: {e}", path.display())))?,
        None => println!("{rendered}"),
    }
    Ok(ExitCode::SUCCESS)
}
