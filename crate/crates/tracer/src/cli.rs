use std::fmt::Write as _;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;
use tracer_core::analyses::{
    check_consistency, discover_solutions, infer_relations, infer_solutions, problem_cnf, AnalysisError, AnalysisMode,
    AnalysisReport, Engine, Options, Solutions, Verdict, SCHEMA_VERSION,
};
use tracer_core::dl::{parse_ontology, DlError};
use tracer_core::forl::{load_spec, parse_spec, pretty_print, typecheck, FrontendError, TypedSpec};
use tracer_core::grounder::Polarity;
use tracer_core::model::{ModelError, TraceabilityInformation};
use tracer_core::nl::{chunk_and_lex, dl_pipeline, flat_to_dl, parse_sentence, parse_sentences, Lexicon, ParseOutcome};
use tracer_core::relational::{build_bounds, Instance, Mode};
use tracer_core::sat::{export_dimacs, SatError};

pub const EXIT_OK: i32 = 0;
pub const EXIT_NEGATIVE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_LIMIT: i32 = 3;

#[derive(Parser, Debug)]
#[command(name = "tracer", version, about = "Traceability reasoning over relational trace specifications")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct Inputs {
    /// FORL specification
    #[arg(value_name = "SPEC")]
    spec_arg: Option<PathBuf>,
    /// Workspace JSON document
    #[arg(value_name = "WORKSPACE")]
    workspace_arg: Option<PathBuf>,
    #[arg(long, conflicts_with = "spec_arg")]
    spec: Option<PathBuf>,
    #[arg(long, conflicts_with = "workspace_arg")]
    workspace: Option<PathBuf>,
}

impl Inputs {
    fn spec_path(&self) -> Result<&Path, Failure> {
        self.spec
            .as_deref()
            .or(self.spec_arg.as_deref())
            .ok_or_else(|| Failure::usage("a specification is required (SPEC or --spec)"))
    }

    fn workspace_path(&self) -> Option<&Path> {
        self.workspace.as_deref().or(self.workspace_arg.as_deref())
    }
}

#[derive(ValueEnum, Debug, Clone, Copy, Default)]
pub enum EngineArg {
    Horn,
    #[default]
    Sat,
}

#[derive(Args, Debug, Clone)]
pub struct Output {
    #[arg(long)]
    json: bool,
    #[arg(long, value_enum, default_value_t = EngineArg::Sat)]
    engine: EngineArg,
    /// Report wall-clock time in stats.ms
    #[arg(long)]
    timing: bool,
}

impl Output {
    fn options(&self) -> Options {
        Options {
            engine: match self.engine {
                EngineArg::Horn => Engine::Horn,
                EngineArg::Sat => Engine::Sat,
            },
            timing: self.timing,
        }
    }
}

#[derive(ValueEnum, Debug, Clone, Copy, Default)]
pub enum PolarityArg {
    #[default]
    Full,
    Pg,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Check the workspace against the non-annotated facts
    Check {
        #[command(flatten)]
        inputs: Inputs,
        #[command(flatten)]
        output: Output,
    },
    /// Infer tuples of the target relations
    Infer {
        #[command(flatten)]
        inputs: Inputs,
        #[command(flatten)]
        output: Output,
        /// Target relation (repeatable); defaults to every Reason@ target
        #[arg(long = "target")]
        targets: Vec<String>,
        /// Number of alternative solutions to print
        #[arg(long, default_value_t = 1)]
        limit: usize,
    },
    /// Suggest new trace locations that repair the workspace
    Discover {
        #[command(flatten)]
        inputs: Inputs,
        #[command(flatten)]
        output: Output,
        #[arg(long, default_value_t = 1)]
        fresh: usize,
        #[arg(long)]
        link_fresh: bool,
        #[arg(long, default_value_t = 1)]
        limit: usize,
    },
    /// Parse a specification, or a sentence file when --lexicon is given
    Parse {
        file: PathBuf,
        #[arg(long)]
        lexicon: Option<PathBuf>,
        #[arg(long)]
        json: bool,
    },
    /// Derive traces from controlled-language sentences
    DlTrace {
        sentences: PathBuf,
        #[arg(long)]
        lexicon: PathBuf,
        #[arg(long)]
        ontology: PathBuf,
        #[arg(long)]
        json: bool,
    },
    /// Serve the HTTP API
    Serve {
        #[command(flatten)]
        inputs: Inputs,
        #[arg(long, default_value_t = 8080)]
        port: u16,
    },
    /// Write the CNF of a consistency or inference problem
    ExportDimacs {
        #[command(flatten)]
        inputs: Inputs,
        #[arg(long = "target")]
        targets: Vec<String>,
        #[arg(long, value_enum, default_value_t = PolarityArg::Full)]
        polarity: PolarityArg,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Debug)]
pub struct Failure {
    pub code: i32,
    pub message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Self {
        Failure {
            code: EXIT_USAGE,
            message: message.into(),
        }
    }

    fn limit(message: impl Into<String>) -> Self {
        Failure {
            code: EXIT_LIMIT,
            message: message.into(),
        }
    }
}

impl From<SatError> for Failure {
    fn from(e: SatError) -> Self {
        Failure::limit(e.to_string())
    }
}

impl From<ModelError> for Failure {
    fn from(e: ModelError) -> Self {
        Failure::usage(e.to_string())
    }
}

impl From<DlError> for Failure {
    fn from(e: DlError) -> Self {
        match e {
            DlError::ResourceLimit(_) => Failure::limit(e.to_string()),
            _ => Failure::usage(e.to_string()),
        }
    }
}

fn analysis_failure(e: AnalysisError) -> Failure {
    match e {
        AnalysisError::Sat(e) => e.into(),
        other => Failure::usage(other.to_string()),
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| Failure::usage(format!("cannot read {}: {e}", path.display())))
}

fn spec_error(path: &Path, e: &FrontendError) -> Failure {
    let lines: Vec<String> = e.diagnostics().iter().map(|d| d.render(&path.display().to_string())).collect();
    Failure::usage(lines.join("\n"))
}

pub fn load_inputs(inputs: &Inputs) -> Result<(String, TypedSpec, TraceabilityInformation), Failure> {
    let path = inputs.spec_path()?;
    let text = read(path)?;
    let spec = load_spec(&text).map_err(|e| spec_error(path, &e))?;
    let info = match inputs.workspace_path() {
        Some(p) => TraceabilityInformation::load(&read(p)?)
            .map_err(|e| Failure::usage(format!("{}: {e}", p.display())))?,
        None => TraceabilityInformation::new(),
    };
    Ok((text, spec, info))
}

fn instance(inputs: &Inputs) -> Result<(TypedSpec, Instance), Failure> {
    let (_, spec, info) = load_inputs(inputs)?;
    let inst = info.to_relational(&spec)?;
    Ok((spec, inst))
}

fn human_report(r: &AnalysisReport, out: &mut String) {
    match r.verdict {
        Verdict::Consistent => out.push_str("Consistent\n"),
        Verdict::Inconsistent => {
            out.push_str("Inconsistent\n");
            for v in &r.violated {
                let _ = writeln!(out, "  violated: {v}");
            }
        }
        Verdict::Solutions if r.inferred.is_empty() => out.push_str("nothing new\n"),
        Verdict::Solutions => {
            for t in &r.inferred {
                let _ = writeln!(out, "{}({})  {}", t.relation, t.tuple.join(", "), t.provenance);
            }
        }
    }
    if r.stats.ms > 0 {
        let _ = writeln!(out, "({} ms, {} vars, {} clauses)", r.stats.ms, r.stats.vars, r.stats.clauses);
    }
}

fn negative(mode: AnalysisMode, violated: Vec<String>) -> AnalysisReport {
    let mut r = AnalysisReport::new(mode, Verdict::Inconsistent);
    r.violated = violated;
    r
}

fn collect(sols: &mut Solutions, limit: usize) -> Result<Vec<AnalysisReport>, Failure> {
    let mut out = Vec::new();
    while out.len() < limit.max(1) {
        match sols.next_report()? {
            Some(r) => out.push(r),
            None => break,
        }
    }
    Ok(out)
}

fn emit_reports(reports: &[AnalysisReport], json: bool, out: &mut String) {
    if json {
        if let [single] = reports {
            out.push_str(&single.to_json());
        } else {
            let v = json!({ "schema": SCHEMA_VERSION, "solutions": reports });
            out.push_str(&serde_json::to_string_pretty(&v).expect("reports serialize"));
        }
        out.push('\n');
        return;
    }
    for (i, r) in reports.iter().enumerate() {
        if reports.len() > 1 {
            let _ = writeln!(out, "solution {}", i + 1);
        }
        human_report(r, out);
    }
}

fn run_command(cmd: Command, out: &mut String) -> Result<i32, Failure> {
    match cmd {
        Command::Check { inputs, output } => {
            let (spec, inst) = instance(&inputs)?;
            let r = check_consistency(&spec, &inst, &output.options()).map_err(analysis_failure)?;
            emit_reports(std::slice::from_ref(&r), output.json, out);
            Ok(if r.verdict == Verdict::Inconsistent { EXIT_NEGATIVE } else { EXIT_OK })
        }
        Command::Infer {
            inputs,
            output,
            targets,
            limit,
        } => {
            let (spec, inst) = instance(&inputs)?;
            let targets: Vec<String> = if targets.is_empty() {
                spec.annotated_targets().into_iter().map(|r| spec.rel_name(r).to_string()).collect()
            } else {
                targets
            };
            if targets.is_empty() {
                return Err(Failure::usage("no --target given and the specification has no Reason@ targets"));
            }
            let names: Vec<&str> = targets.iter().map(String::as_str).collect();
            let opts = output.options();
            let reports = if limit <= 1 || matches!(opts.engine, Engine::Horn) {
                match infer_relations(&spec, &inst, &names, &opts) {
                    Ok(r) => vec![r],
                    Err(AnalysisError::InconsistentPremises { violated }) => {
                        emit_reports(&[negative(AnalysisMode::Infer, violated)], output.json, out);
                        return Ok(EXIT_NEGATIVE);
                    }
                    Err(e) => return Err(analysis_failure(e)),
                }
            } else {
                let mut sols = infer_solutions(&spec, &inst, &names).map_err(analysis_failure)?;
                let reports = collect(&mut sols, limit)?;
                if reports.is_empty() {
                    let violated = tracer_core::analyses::localize(&spec, sols.bounds(), sols.facts())?;
                    emit_reports(&[negative(AnalysisMode::Infer, violated)], output.json, out);
                    return Ok(EXIT_NEGATIVE);
                }
                reports
            };
            emit_reports(&reports, output.json, out);
            Ok(EXIT_OK)
        }
        Command::Discover {
            inputs,
            output,
            fresh,
            link_fresh,
            limit,
        } => {
            let (spec, inst) = instance(&inputs)?;
            let mut sols = discover_solutions(&spec, &inst, fresh, link_fresh).map_err(analysis_failure)?;
            let reports = collect(&mut sols, limit)?;
            if reports.is_empty() {
                let violated = tracer_core::analyses::localize(&spec, sols.bounds(), sols.facts())?;
                emit_reports(&[negative(AnalysisMode::Discover, violated)], output.json, out);
                return Ok(EXIT_NEGATIVE);
            }
            emit_reports(&reports, output.json, out);
            Ok(EXIT_OK)
        }
        Command::Parse { file, lexicon, json } => match lexicon {
            Some(lex_path) => parse_sentence_file(&file, &lex_path, json, out),
            None => parse_spec_file(&file, json, out),
        },
        Command::DlTrace {
            sentences,
            lexicon,
            ontology,
            json,
        } => {
            let lex = Lexicon::from_json(&read(&lexicon)?).map_err(|e| Failure::usage(format!("{}: {e}", lexicon.display())))?;
            let onto = parse_ontology(&read(&ontology)?).map_err(|e| Failure::usage(format!("{}: {e}", ontology.display())))?;
            let report = dl_pipeline(&read(&sentences)?, &lex, &onto)?;
            if json {
                out.push_str(&report.to_json());
                out.push('\n');
            } else {
                for a in &report.axioms {
                    let _ = writeln!(out, "{}: {}  ({})", a.id, a.axiom, a.status);
                }
                for f in &report.failures {
                    let _ = writeln!(out, "{}: line {}: {}", f.id, f.line, f.reason);
                }
                for t in &report.traces {
                    let _ = writeln!(out, "{}({}, {})  DL", t.kind.relation(), t.from, t.to);
                }
            }
            Ok(EXIT_OK)
        }
        Command::Serve { inputs, port } => {
            let (text, spec, info) = load_inputs(&inputs)?;
            info.to_relational(&spec)?;
            let state = crate::server::AppState::new(text, spec, info, inputs.workspace_path().map(Path::to_path_buf));
            let rt = tokio::runtime::Runtime::new().map_err(|e| Failure::limit(e.to_string()))?;
            rt.block_on(crate::server::serve(state, port))
                .map_err(|e| Failure::limit(format!("server failed: {e}")))?;
            Ok(EXIT_OK)
        }
        Command::ExportDimacs {
            inputs,
            targets,
            polarity,
            out: path,
        } => {
            let (spec, inst) = instance(&inputs)?;
            let names: Vec<&str> = targets.iter().map(String::as_str).collect();
            let (mode, facts) = if names.is_empty() {
                (Mode::Consistency, spec.consistency_facts())
            } else {
                let ids = tracer_core::analyses::resolve_targets(&spec, &names).map_err(analysis_failure)?;
                let facts = spec.inference_facts(&ids);
                (Mode::Infer { targets: ids }, facts)
            };
            let bounds = build_bounds(&mode, &spec, &inst).map_err(|e| Failure::usage(e.to_string()))?;
            let polarity = match polarity {
                PolarityArg::Full => Polarity::Full,
                PolarityArg::Pg => Polarity::Pg,
            };
            let (cnf, vm) = problem_cnf(&spec, &bounds, &facts, polarity);
            let mut text = String::new();
            for (v, r, t) in vm.iter() {
                let _ = writeln!(text, "c {} {}({})", v.0 + 1, spec.rel_name(r), bounds.universe.names(t).join(","));
            }
            text.push_str(&export_dimacs(&cnf));
            match path {
                Some(p) => std::fs::write(&p, text).map_err(|e| Failure::usage(format!("cannot write {}: {e}", p.display())))?,
                None => out.push_str(&text),
            }
            Ok(EXIT_OK)
        }
    }
}

fn parse_spec_file(file: &Path, json: bool, out: &mut String) -> Result<i32, Failure> {
    let text = read(file)?;
    let ast = parse_spec(&text).map_err(|e| spec_error(file, &e.into()))?;
    let spec = typecheck(&ast).map_err(|e| spec_error(file, &FrontendError::Type(e)))?;
    if json {
        let v = json!({
            "schema": SCHEMA_VERSION,
            "sigs": spec.sigs.iter().map(|s| s.name.clone()).collect::<Vec<_>>(),
            "relations": spec.field_ids().map(|r| json!({
                "name": spec.rel_name(r),
                "arity": spec.relations[r].arity(),
            })).collect::<Vec<_>>(),
            "facts": spec.facts.iter().filter(|f| !f.implicit).map(|f| json!({
                "name": f.name,
                "annotated": f.is_annotated(),
                "horn": f.is_horn(),
            })).collect::<Vec<_>>(),
        });
        out.push_str(&serde_json::to_string_pretty(&v).expect("summary serializes"));
        out.push('\n');
    } else {
        out.push_str(&pretty_print(&ast));
    }
    Ok(EXIT_OK)
}

fn parse_sentence_file(file: &Path, lexicon: &Path, json: bool, out: &mut String) -> Result<i32, Failure> {
    let lex = Lexicon::from_json(&read(lexicon)?).map_err(|e| Failure::usage(format!("{}: {e}", lexicon.display())))?;
    let mut rows = Vec::new();
    for s in parse_sentences(&read(file)?) {
        let chunks = chunk_and_lex(&s.text, &lex);
        let outcome = parse_sentence(&chunks, &lex);
        let axiom = outcome.flat().and_then(|f| flat_to_dl(f, &s.id).ok()).map(|a| a.to_string());
        if !json {
            let status = match &outcome {
                ParseOutcome::Full { .. } => "full".to_string(),
                ParseOutcome::Partial { .. } => "partial".to_string(),
                ParseOutcome::Failure { reason } => format!("failure: {reason}"),
            };
            let tags: String = chunks.iter().map(|c| c.tag(&lex)).collect();
            let _ = writeln!(out, "{}: {tags}  {status}", s.id);
            if let Some(a) = &axiom {
                let _ = writeln!(out, "    {a}");
            }
        }
        rows.push(json!({
            "id": s.id,
            "line": s.line,
            "sentence": s.text,
            "chunks": chunks.iter().map(|c| c.tag(&lex)).collect::<Vec<_>>(),
            "outcome": outcome,
            "axiom": axiom,
        }));
    }
    if json {
        let v = json!({ "schema": SCHEMA_VERSION, "sentences": rows });
        out.push_str(&serde_json::to_string_pretty(&v).expect("rows serialize"));
        out.push('\n');
    }
    Ok(EXIT_OK)
}

/// Runs the command line and returns the process exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if e.use_stderr() { stderr.write_all(text.as_bytes()) } else { stdout.write_all(text.as_bytes()) };
            return code;
        }
    };
    let mut out = String::new();
    let code = match run_command(cli.command, &mut out) {
        Ok(c) => c,
        Err(f) => {
            let _ = writeln!(stderr, "error: {}", f.message);
            f.code
        }
    };
    let _ = stdout.write_all(out.as_bytes());
    code
}
