//! Command-line driver and HTTP service over the `typeseed` core.

use std::io::Write;
use std::path::PathBuf;

use anyhow::{bail, Context};
use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};
use typeseed::pipeline::DEFAULT_MAX_ITERS;
use typeseed::wire::to_json;
use typeseed::{
    extract_appropriate_functions, generate_examples, load_type_info, parse_type_expression,
    register_types_fixed_point, FunctionSignature, GeneratedValue, RandomState, Registry, TypeInfo,
};

pub mod service;

pub const DEFAULT_SEED: u64 = 1;

#[derive(Debug, Parser)]
#[command(name = "typeseed", version, about = "Seeded, type-directed example generation")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate wire-encoded examples of a type or of a function's arguments.
    Gen {
        /// Type expression, e.g. `list[int]` or `int|float|str`.
        #[arg(long = "type", required_unless_present = "function", conflicts_with = "function")]
        ty: Option<String>,
        /// Generate argument tuples for this function from `--typeinfo`.
        #[arg(long, requires = "typeinfo")]
        function: Option<String>,
        #[arg(long, default_value_t = 1)]
        n: usize,
        #[arg(long, env = "TYPESEED_SEED", default_value_t = DEFAULT_SEED)]
        seed: u64,
        /// Register the classes of this TypeInfo file first.
        #[arg(long)]
        typeinfo: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Format::Jsonl)]
        format: Format,
        #[arg(long, default_value_t = DEFAULT_MAX_ITERS)]
        max_iters: usize,
    },
    /// Register the classes of a TypeInfo file and print the report.
    Register {
        #[arg(long)]
        typeinfo: PathBuf,
        #[arg(long, default_value_t = DEFAULT_MAX_ITERS)]
        max_iters: usize,
    },
    /// List the functions of a TypeInfo file whose types all resolve.
    Appropriate {
        #[arg(long)]
        typeinfo: PathBuf,
        #[arg(long, value_enum, default_value_t = Format::Jsonl)]
        format: Format,
        #[arg(long, default_value_t = DEFAULT_MAX_ITERS)]
        max_iters: usize,
    },
    /// Serve registration and generation over HTTP.
    Serve {
        #[arg(long, default_value_t = 8080)]
        port: u16,
        #[arg(long, env = "TYPESEED_SEED", default_value_t = DEFAULT_SEED)]
        seed: u64,
        #[arg(long, default_value_t = 10_000)]
        max_examples: usize,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    /// One JSON array.
    Json,
    /// One JSON document per line.
    Jsonl,
}

/// Runs every subcommand except `serve`, writing results to `out`.
pub fn run(command: Command, out: &mut impl Write) -> anyhow::Result<()> {
    match command {
        Command::Gen {
            ty,
            function,
            n,
            seed,
            typeinfo,
            format,
            max_iters,
        } => {
            let mut reg = Registry::init_types();
            let info = match &typeinfo {
                Some(path) => Some(register_file(&mut reg, path, max_iters)?),
                None => None,
            };
            let ty = match (ty, function, &info) {
                (Some(text), _, _) => parse_type_expression(&text)?,
                (None, Some(name), Some(info)) => function_arguments(&reg, info, &name)?,
                _ => bail!("either --type or --function is required"),
            };
            let (values, _) = generate_examples(&reg, &ty, n, RandomState::from_seed(seed))?;
            emit(out, values.iter().map(to_json), format)
        }
        Command::Register { typeinfo, max_iters } => {
            let mut reg = Registry::init_types();
            let info = load_type_info(&typeinfo)?;
            let report = register_types_fixed_point(&mut reg, &info, max_iters);
            writeln!(out, "{}", serde_json::to_string_pretty(&report)?)?;
            Ok(())
        }
        Command::Appropriate {
            typeinfo,
            format,
            max_iters,
        } => {
            let mut reg = Registry::init_types();
            let info = register_file(&mut reg, &typeinfo, max_iters)?;
            let functions = extract_appropriate_functions(&reg, &info);
            emit(out, functions.into_iter().map(signature_json), format)
        }
        Command::Serve { .. } => bail!("serve is not a batch command"),
    }
}

fn register_file(reg: &mut Registry, path: &PathBuf, max_iters: usize) -> anyhow::Result<TypeInfo> {
    let info = load_type_info(path)?;
    let report = register_types_fixed_point(reg, &info, max_iters);
    for r in &report.rejected {
        log::info!("class {} not admitted; unresolved: {:?}", r.class, r.unresolved);
    }
    Ok(info)
}

/// Argument tuple type of `name`, matched on the qualified or local name.
fn function_arguments(reg: &Registry, info: &TypeInfo, name: &str) -> anyhow::Result<typeseed::TypeExpr> {
    let wanted = name.to_lowercase();
    let f = info
        .functions
        .iter()
        .find(|f| f.qualified_name.to_lowercase() == wanted || f.local_name().to_lowercase() == wanted)
        .with_context(|| format!("no function named '{name}'"))?;
    if !extract_appropriate_functions(reg, info).contains(&f) {
        bail!("function '{}' mentions types that are not registered", f.qualified_name);
    }
    f.argument_tuple()
        .with_context(|| format!("function '{}' takes no arguments", f.qualified_name))
}

/// A signature in the same shape the TypeInfo schema uses.
pub fn signature_json(f: &FunctionSignature) -> Value {
    json!({
        "qualified_name": f.qualified_name,
        "params": f.params.iter().map(|(n, t)| json!({"name": n, "type": t.to_string()})).collect::<Vec<_>>(),
        "return": f.ret.to_string(),
    })
}

fn emit(out: &mut impl Write, items: impl Iterator<Item = Value>, format: Format) -> anyhow::Result<()> {
    match format {
        Format::Jsonl => {
            for item in items {
                writeln!(out, "{item}")?;
            }
        }
        Format::Json => writeln!(out, "{}", Value::Array(items.collect()))?,
    }
    out.flush()?;
    Ok(())
}

/// Wire encoding of a batch, as returned by the service.
pub fn wire_array(values: &[GeneratedValue]) -> Value {
    Value::Array(values.iter().map(to_json).collect())
}
