use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::process::ExitCode;

use clap::{Arg, ArgAction, ArgMatches, Command as ClapCommand};
use serde_json::{Map, Value};

mod commands;
mod settings;
mod table;

use commands::Command;
use settings::{Format, Settings, KEYS};

/// Failure classes mapped to exit codes: 2 for bad input, 1 for a failed validation.
#[derive(Debug)]
pub struct CliError {
    pub message: String,
    pub code: u8,
}

impl CliError {
    pub fn input(message: impl Into<String>) -> Self {
        Self {
            message: message.into(),
            code: 2,
        }
    }
}

impl From<swapengine::Error> for CliError {
    fn from(e: swapengine::Error) -> Self {
        Self::input(e.to_string())
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.message)
    }
}

fn cli() -> ClapCommand {
    let mut cmd = ClapCommand::new("qo")
        .about("Exact work and heat statistics of a two-qudit partial-swap Otto engine")
        .version(env!("CARGO_PKG_VERSION"))
        .subcommand_required(false)
        .arg(
            Arg::new("config")
                .long("config")
                .global(true)
                .value_name("FILE")
                .help("key = value file; flags override it"),
        )
        .arg(
            Arg::new("jobs")
                .long("jobs")
                .global(true)
                .env("QO_JOBS")
                .value_parser(clap::value_parser!(usize))
                .help("worker threads for grid evaluation"),
        );
    for (key, help) in KEYS {
        let mut arg = Arg::new(*key)
            .long(key.replace('_', "-"))
            .global(true)
            .allow_hyphen_values(true)
            .help(*help);
        if *key == "axis" {
            arg = arg.action(ArgAction::Append);
        }
        cmd = cmd.arg(arg);
    }
    for c in Command::ALL {
        cmd = cmd.subcommand(ClapCommand::new(c.name()).about(c.about()));
    }
    cmd
}

/// Flag assignments in command-line order.
fn flag_assignments(m: &ArgMatches) -> Vec<(usize, &'static str, String)> {
    let mut out = Vec::new();
    for (key, _) in KEYS {
        if m.value_source(key) != Some(clap::parser::ValueSource::CommandLine) {
            continue;
        }
        if let (Some(values), Some(idx)) = (m.get_many::<String>(key), m.indices_of(key)) {
            for (v, i) in values.zip(idx) {
                out.push((i, *key, v.clone()));
            }
        }
    }
    out.sort_by_key(|(i, _, _)| *i);
    out
}

fn run() -> Result<bool, CliError> {
    let matches = cli().get_matches();
    let (sub, m) = match matches.subcommand() {
        Some((name, sub)) => (Some(name.to_string()), sub),
        None => (None, &matches),
    };

    let mut s = Settings::default();
    if let Some(path) = m.get_one::<String>("config") {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::input(format!("cannot read {path}: {e}")))?;
        s.load_file(&text)?;
    }
    for (_, key, value) in flag_assignments(m) {
        s.set(key, &value)?;
    }

    let name = match (&sub, &s.command) {
        (Some(a), Some(b)) if a != b => {
            return Err(CliError::input(format!("config is for {b:?} but {a:?} was requested")))
        }
        (Some(a), _) => a.clone(),
        (None, Some(b)) => b.clone(),
        (None, None) => return Err(CliError::input("no subcommand given (try --help)")),
    };
    let command = Command::from_name(&name).ok_or_else(|| CliError::input(format!("unknown subcommand {name:?}")))?;

    let jobs = m.get_one::<usize>("jobs").copied().unwrap_or(0);
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map_err(|e| CliError::input(format!("cannot start {jobs} workers: {e}")))?;
    let report = pool.install(|| command.run(&s))?;

    let format = s.format.unwrap_or(if command == Command::Moments {
        Format::Json
    } else {
        Format::Csv
    });
    let mut config = Map::new();
    config.insert("command".into(), Value::from(command.name()));
    for (k, v) in s.record() {
        if k == "command" || k == "output" {
            continue;
        }
        let value = match v.as_slice() {
            [one] if k != "axis" => Value::from(one.as_str()),
            many => Value::from(many.to_vec()),
        };
        config.insert(k.clone(), value);
    }
    let write = |out: &mut dyn Write| report.write(format, Value::Object(config.clone()), out);
    let result = match &s.output {
        Some(path) => {
            let file = File::create(path).map_err(|e| CliError::input(format!("cannot create {}: {e}", path.display())))?;
            let mut w = BufWriter::new(file);
            write(&mut w).and_then(|_| w.flush().map_err(Into::into))
        }
        None => {
            let stdout = io::stdout();
            let mut lock = stdout.lock();
            write(&mut lock)
        }
    };
    if let Err(e) = result {
        let closed = e
            .downcast_ref::<io::Error>()
            .or_else(|| e.downcast_ref::<csv::Error>().and_then(|c| match c.kind() {
                csv::ErrorKind::Io(io) => Some(io),
                _ => None,
            }))
            .is_some_and(|io| io.kind() == io::ErrorKind::BrokenPipe);
        if !closed {
            return Err(CliError::input(format!("output failed: {e}")));
        }
    }
    if report.failed {
        eprintln!("validation failed");
    }
    Ok(!report.failed)
}

fn main() -> ExitCode {
    match run() {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.code)
        }
    }
}
