use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use haiproto::catalog::{self, Catalog, CatalogError};
use haiproto::diag::{Diagnostic, Severity};
use haiproto::runtime::{self, AgentsFixture, RunError};
use haiproto::{diagram, dsl};

/// Check, format, browse and simulate human-AI interaction protocols.
#[derive(Parser)]
#[command(name = "haiproto", version)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Parse and check `.hai` files or directories.
    Check {
        paths: Vec<PathBuf>,
        /// Exit 1 on warnings too.
        #[arg(long)]
        deny_warnings: bool,
        #[arg(long)]
        json: bool,
    },
    /// Rewrite files in canonical form.
    Fmt {
        #[arg(required = true)]
        paths: Vec<PathBuf>,
        /// Report files that would change without writing them.
        #[arg(long)]
        check: bool,
    },
    /// Browse the pattern catalog.
    Catalog {
        #[command(subcommand)]
        cmd: CatalogCmd,
        /// Fixture directory instead of the built-in corpus.
        #[arg(long, global = true)]
        fixtures: Option<PathBuf>,
    },
    /// Enact a pattern or scenario between agents.
    Run {
        name: String,
        #[arg(long)]
        agents: PathBuf,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1)]
        repeat: usize,
        /// Write the JSON-lines trace here; `-` for stdout.
        #[arg(long)]
        trace: Option<PathBuf>,
        #[arg(long)]
        fixtures: Option<PathBuf>,
    },
    /// Render a pattern or scenario as a sequence diagram.
    Diagram {
        name: String,
        #[arg(long, default_value = "mermaid", value_parser = ["mermaid"])]
        format: String,
        #[arg(long)]
        fixtures: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
enum CatalogCmd {
    /// Every pattern with its tags and length.
    List,
    /// Patterns carrying any of the given tags.
    Query {
        #[arg(long = "tag", required = true)]
        tags: Vec<String>,
    },
    /// Structural diff of two patterns or scenarios.
    Diff {
        a: String,
        b: String,
        #[arg(long)]
        json: bool,
    },
    /// The whole catalog as JSON.
    Export {
        #[arg(long)]
        json: bool,
    },
}

/// Exit status: 0 success, 1 check or conformance failure, 2 usage or IO.
struct Fail(u8, String);

impl From<CatalogError> for Fail {
    fn from(e: CatalogError) -> Self {
        match e {
            CatalogError::Invalid(diags) => Fail(1, render(&diags)),
            CatalogError::Io { .. } | CatalogError::UnknownPattern(_) | CatalogError::UnknownTag(_) | CatalogError::Empty => {
                Fail(2, e.to_string())
            }
        }
    }
}

fn render(diags: &[Diagnostic]) -> String {
    diags.iter().map(|d| d.to_string()).collect::<Vec<_>>().join("\n")
}

/// Flag, then `HAIPROTO_FIXTURES`, then the built-in corpus.
fn corpus(flag: Option<PathBuf>) -> Result<Catalog, Fail> {
    match flag.or_else(|| std::env::var_os("HAIPROTO_FIXTURES").map(PathBuf::from)) {
        Some(dir) => {
            if !dir.exists() {
                return Err(Fail(2, format!("{}: no such file or directory", dir.display())));
            }
            Ok(catalog::load(&[dir])?)
        }
        None => Ok(catalog::embedded()),
    }
}

fn check(paths: Vec<PathBuf>, deny_warnings: bool, json: bool) -> Result<(), Fail> {
    let paths = if paths.is_empty() {
        std::env::var_os("HAIPROTO_FIXTURES").map(PathBuf::from).into_iter().collect()
    } else {
        paths
    };
    if let Some(missing) = paths.iter().find(|p| !p.exists()) {
        return Err(Fail(2, format!("{}: no such file or directory", missing.display())));
    }
    let diags = if paths.is_empty() {
        catalog::embedded().check_all()
    } else {
        match catalog::load(&paths) {
            Ok(cat) => cat.check_all(),
            Err(CatalogError::Invalid(d)) => d,
            Err(e) => return Err(e.into()),
        }
    };
    let errors = diags.iter().filter(|d| d.severity == Severity::Error).count();
    let warnings = diags.len() - errors;
    if json {
        let out = serde_json::json!({ "diagnostics": diags, "errors": errors, "warnings": warnings });
        println!("{}", serde_json::to_string_pretty(&out).expect("json"));
    } else {
        for d in &diags {
            println!("{d}");
        }
        println!("{errors} error(s), {warnings} warning(s)");
    }
    if errors > 0 || (deny_warnings && warnings > 0) {
        return Err(Fail(1, String::new()));
    }
    Ok(())
}

fn fmt(paths: Vec<PathBuf>, check_only: bool) -> Result<(), Fail> {
    let files = catalog::source_files(&paths)?;
    let mut status = Ok(());
    for path in files {
        let text = std::fs::read_to_string(&path).map_err(|e| Fail(2, format!("{}: {e}", path.display())))?;
        let shown = path.display().to_string();
        let file = match dsl::parse_named(&shown, &text) {
            Ok(f) => f,
            Err(d) => {
                eprintln!("{}", render(&d));
                status = Err(Fail(1, String::new()));
                continue;
            }
        };
        let canonical = dsl::print(&file);
        if canonical == text {
            continue;
        }
        if check_only {
            println!("would reformat {shown}");
            status = Err(Fail(1, String::new()));
        } else {
            std::fs::write(&path, canonical).map_err(|e| Fail(2, format!("{shown}: {e}")))?;
            println!("formatted {shown}");
        }
    }
    status
}

fn catalog_cmd(cmd: CatalogCmd, fixtures: Option<PathBuf>) -> Result<(), Fail> {
    let cat = corpus(fixtures)?;
    match cmd {
        CatalogCmd::List => {
            for p in cat.query(&[]) {
                let tags: Vec<&str> = p.tags.iter().map(|t| t.as_str()).collect();
                println!("{:<36} @{:<14} {} message(s)", p.name, tags.join(","), p.messages.len());
            }
        }
        CatalogCmd::Query { tags } => {
            let tags = catalog::parse_tags(&tags)?;
            for p in cat.query(&tags) {
                println!("{}", p.name);
            }
        }
        CatalogCmd::Diff { a, b, json } => {
            let d = cat.diff(&a, &b)?;
            if json {
                println!("{}", serde_json::to_string_pretty(&d).expect("json"));
            } else {
                println!("--- {a}\n+++ {b}");
                for s in &d.shared {
                    println!("  {s}");
                }
                for s in &d.only_in_a {
                    println!("- {s}");
                }
                for s in &d.only_in_b {
                    println!("+ {s}");
                }
                for c in &d.direction_changes {
                    println!("~ {}: {} | {}", c.action, c.in_a, c.in_b);
                }
            }
        }
        CatalogCmd::Export { .. } => println!("{}", cat.export_json()),
    }
    Ok(())
}

fn run_cmd(
    name: String,
    agents: &Path,
    seed: u64,
    repeat: usize,
    trace: Option<PathBuf>,
    fixtures: Option<PathBuf>,
) -> Result<(), Fail> {
    let cat = corpus(fixtures)?;
    let fixture = AgentsFixture::load(agents).map_err(|e| Fail(2, e.to_string()))?;
    let mut live = fixture.build();
    let result = if let Some(p) = cat.patterns.get(&name) {
        runtime::run_repeated(&cat, p, &mut live, seed, repeat)
    } else if let Some(sc) = cat.scenarios.get(&name) {
        let parts: Vec<_> = sc.patterns.iter().filter_map(|n| cat.patterns.get(n)).collect();
        runtime::run_scenario(&cat, &name, &parts, &mut live, seed, repeat)
    } else {
        return Err(CatalogError::UnknownPattern(name).into());
    };
    let traces = match result {
        Ok(t) => t,
        Err(RunError::MissingAgent(role)) => return Err(Fail(2, format!("{}: no agent for role `{role}`", agents.display()))),
        Err(RunError::Check(report)) => return Err(Fail(1, render(&report.diagnostics))),
    };
    let jsonl = runtime::to_jsonl(&traces);
    match trace.as_deref() {
        Some(p) if p == Path::new("-") => print!("{jsonl}"),
        Some(p) => std::fs::write(p, &jsonl).map_err(|e| Fail(2, format!("{}: {e}", p.display())))?,
        None => {}
    }
    let mut failed = None;
    for t in &traces {
        match t.outcome {
            runtime::Outcome::Completed => eprintln!("{}: completed, {} step(s)", t.run, t.steps.len()),
            runtime::Outcome::Aborted { step, code } => {
                let detail = match &t.steps[step - 1].verdict {
                    runtime::StepVerdict::Violation { detail, .. } => detail.as_str(),
                    runtime::StepVerdict::Conformant => "",
                };
                eprintln!("{}: aborted at step {step} [{code}] {detail}", t.run);
                failed = Some(code);
            }
        }
    }
    let completed = traces.iter().filter(|t| t.completed()).count();
    let messages: usize = traces.iter().map(|t| t.steps.len()).sum();
    eprintln!("{completed} completed, {} aborted, {messages} message(s)", traces.len() - completed);
    match failed {
        Some(code) => Err(Fail(1, format!("conformance violation {code}"))),
        None => Ok(()),
    }
}

fn diagram_cmd(name: String, fixtures: Option<PathBuf>) -> Result<(), Fail> {
    let cat = corpus(fixtures)?;
    let p = cat.runnable(&name)?;
    print!("{}", diagram::mermaid(&p, &cat).map_err(|e| Fail(1, e))?);
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.cmd {
        Cmd::Check { paths, deny_warnings, json } => check(paths, deny_warnings, json),
        Cmd::Fmt { paths, check } => fmt(paths, check),
        Cmd::Catalog { cmd, fixtures } => catalog_cmd(cmd, fixtures),
        Cmd::Run { name, agents, seed, repeat, trace, fixtures } => run_cmd(name, &agents, seed, repeat, trace, fixtures),
        Cmd::Diagram { name, fixtures, .. } => diagram_cmd(name, fixtures),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Fail(code, msg)) => {
            if !msg.is_empty() {
                eprintln!("{msg}");
            }
            ExitCode::from(code)
        }
    }
}
