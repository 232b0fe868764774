//! Fixed-point registration of user classes and selection of the functions
//! whose signatures can be fully generated.
//!
//! Input is a TypeInfo document:
//!
//! ```json
//! {"classes": [{"qualified_name": "m.c",
//!               "fields": [{"name": "a", "type": "float"}],
//!               "methods": [<signature>]}],
//!  "functions": [{"qualified_name": "m.f",
//!                 "params": [{"name": "x", "type": "list[int]"}],
//!                 "return": "nonetype"}]}
//! ```

use std::collections::{BTreeSet, HashSet};
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::expr::{parse_type_expression, ParseError, TypeExpr};
use crate::registry::Registry;

pub const DEFAULT_MAX_ITERS: usize = 5;

#[derive(Debug, Error)]
pub enum IngestError {
    #[error("cannot read {path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("schema violation at {path}: {message}")]
    Schema { path: String, message: String },
    #[error("bad type in {declaring} at {path}: {source}")]
    Type {
        declaring: String,
        path: String,
        source: ParseError,
    },
    #[error("duplicate {what} '{name}'")]
    Duplicate { what: &'static str, name: String },
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FunctionSignature {
    pub qualified_name: String,
    pub params: Vec<(String, TypeExpr)>,
    pub ret: TypeExpr,
}

impl FunctionSignature {
    /// Name after the last dot.
    pub fn local_name(&self) -> &str {
        self.qualified_name.rsplit('.').next().unwrap_or(&self.qualified_name)
    }

    /// Parameter types as one fixed tuple, the shape of an argument vector.
    /// `None` for functions without parameters.
    pub fn argument_tuple(&self) -> Option<TypeExpr> {
        if self.params.is_empty() {
            return None;
        }
        Some(TypeExpr::apply(
            "fixedtuple",
            self.params.iter().map(|(_, t)| t.clone()).collect(),
        ))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClassInfo {
    pub qualified_name: String,
    pub fields: Vec<(String, TypeExpr)>,
    pub methods: Vec<FunctionSignature>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct TypeInfo {
    pub classes: Vec<ClassInfo>,
    pub functions: Vec<FunctionSignature>,
}

/// Every type mentioned by a signature, including nested argument types.
pub fn types_of(f: &FunctionSignature) -> BTreeSet<TypeExpr> {
    f.params
        .iter()
        .map(|(_, t)| t)
        .chain(std::iter::once(&f.ret))
        .flat_map(|t| t.walk())
        .cloned()
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Admission {
    pub class: String,
    pub pass: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Rejection {
    pub class: String,
    /// Types that did not resolve at the end of the run.
    pub unresolved: Vec<String>,
    /// Set when the guard passed but the record itself was refused.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RegistrationReport {
    pub admitted: Vec<Admission>,
    pub rejected: Vec<Rejection>,
    pub iterations_used: usize,
    pub fixed_point_reached: bool,
}

impl RegistrationReport {
    pub fn admitted_names(&self) -> Vec<&str> {
        self.admitted.iter().map(|a| a.class.as_str()).collect()
    }
}

fn class_types(class: &ClassInfo) -> impl Iterator<Item = &TypeExpr> {
    class.fields.iter().map(|(_, t)| t).chain(
        class
            .methods
            .iter()
            .flat_map(|m| m.params.iter().map(|(_, t)| t).chain([&m.ret])),
    )
}

/// Repeatedly admits classes whose field and method types all resolve,
/// registering each as a record of its fields, until a pass admits nothing
/// or `max_iters` passes have run. A class admitted mid-pass is visible to
/// the classes after it in the same pass.
pub fn register_types_fixed_point(reg: &mut Registry, info: &TypeInfo, max_iters: usize) -> RegistrationReport {
    let max_iters = max_iters.max(1);
    let mut admitted = Vec::new();
    let mut done: HashSet<&str> = HashSet::new();
    let mut refused: Vec<(&str, String)> = Vec::new();
    let mut iterations_used = 0;
    let mut fixed_point_reached = false;

    for pass in 1..=max_iters {
        iterations_used = pass;
        let mut changed = false;
        for class in &info.classes {
            let name = class.qualified_name.as_str();
            if done.contains(name) {
                continue;
            }
            if !class_types(class).all(|t| reg.resolves(t)) {
                continue;
            }
            done.insert(name);
            match reg.register_record(name, &class.fields) {
                Ok(()) => {
                    admitted.push(Admission {
                        class: name.to_string(),
                        pass,
                    });
                    changed = true;
                }
                Err(e) => refused.push((name, e.to_string())),
            }
        }
        if !changed {
            fixed_point_reached = true;
            break;
        }
    }

    let mut rejected: Vec<Rejection> = info
        .classes
        .iter()
        .filter(|c| !done.contains(c.qualified_name.as_str()))
        .map(|c| {
            let unresolved: BTreeSet<String> = class_types(c)
                .filter(|t| !reg.resolves(t))
                .map(|t| t.to_string())
                .collect();
            Rejection {
                class: c.qualified_name.clone(),
                unresolved: unresolved.into_iter().collect(),
                error: None,
            }
        })
        .collect();
    rejected.extend(refused.into_iter().map(|(class, error)| Rejection {
        class: class.to_string(),
        unresolved: Vec::new(),
        error: Some(error),
    }));

    RegistrationReport {
        admitted,
        rejected,
        iterations_used,
        fixed_point_reached,
    }
}

/// Functions whose every signature type resolves in `reg`, in input order.
pub fn extract_appropriate_functions<'a>(reg: &Registry, info: &'a TypeInfo) -> Vec<&'a FunctionSignature> {
    info.functions
        .iter()
        .filter(|f| types_of(f).iter().all(|t| reg.resolves(t)))
        .collect()
}

// Wire schema.

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawTypeInfo {
    #[serde(default)]
    classes: Vec<RawClass>,
    #[serde(default)]
    functions: Vec<RawSignature>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawClass {
    qualified_name: String,
    #[serde(default)]
    fields: Vec<RawNamed>,
    #[serde(default)]
    methods: Vec<RawSignature>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSignature {
    qualified_name: String,
    params: Vec<RawNamed>,
    #[serde(rename = "return")]
    ret: String,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawNamed {
    name: String,
    #[serde(rename = "type")]
    ty: String,
}

fn parse_at(text: &str, declaring: &str, path: String) -> Result<TypeExpr, IngestError> {
    parse_type_expression(text).map_err(|source| IngestError::Type {
        declaring: declaring.to_string(),
        path,
        source,
    })
}

fn convert_signature(raw: RawSignature, path: &str) -> Result<FunctionSignature, IngestError> {
    let name = raw.qualified_name;
    let mut seen = HashSet::new();
    let mut params = Vec::with_capacity(raw.params.len());
    for (i, p) in raw.params.into_iter().enumerate() {
        if !seen.insert(p.name.clone()) {
            return Err(IngestError::Duplicate {
                what: "parameter",
                name: format!("{name}.{}", p.name),
            });
        }
        let ty = parse_at(&p.ty, &name, format!("{path}.params[{i}].type"))?;
        params.push((p.name, ty));
    }
    let ret = parse_at(&raw.ret, &name, format!("{path}.return"))?;
    Ok(FunctionSignature {
        qualified_name: name,
        params,
        ret,
    })
}

pub fn parse_type_info(text: &str) -> Result<TypeInfo, IngestError> {
    if !text.trim_start().starts_with('{') {
        return Err(IngestError::Schema {
            path: ".".into(),
            message: "expected a JSON object".into(),
        });
    }
    let de = &mut serde_json::Deserializer::from_str(text);
    let raw: RawTypeInfo = serde_path_to_error::deserialize(de).map_err(|e| IngestError::Schema {
        path: e.path().to_string(),
        message: e.inner().to_string(),
    })?;

    let mut class_names = HashSet::new();
    let mut classes = Vec::with_capacity(raw.classes.len());
    for (ci, c) in raw.classes.into_iter().enumerate() {
        let name = c.qualified_name.to_lowercase();
        if !class_names.insert(name.clone()) {
            return Err(IngestError::Duplicate { what: "class", name });
        }
        let mut fields = Vec::with_capacity(c.fields.len());
        for (fi, f) in c.fields.into_iter().enumerate() {
            let ty = parse_at(&f.ty, &name, format!("classes[{ci}].fields[{fi}].type"))?;
            fields.push((f.name, ty));
        }
        let methods = c
            .methods
            .into_iter()
            .enumerate()
            .map(|(mi, m)| convert_signature(m, &format!("classes[{ci}].methods[{mi}]")))
            .collect::<Result<_, _>>()?;
        classes.push(ClassInfo {
            qualified_name: name,
            fields,
            methods,
        });
    }

    let mut function_names = HashSet::new();
    let mut functions = Vec::with_capacity(raw.functions.len());
    for (i, f) in raw.functions.into_iter().enumerate() {
        if !function_names.insert(f.qualified_name.clone()) {
            return Err(IngestError::Duplicate {
                what: "function",
                name: f.qualified_name,
            });
        }
        functions.push(convert_signature(f, &format!("functions[{i}]"))?);
    }
    Ok(TypeInfo { classes, functions })
}

pub fn load_type_info(path: impl AsRef<Path>) -> Result<TypeInfo, IngestError> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|source| IngestError::Io {
        path: path.display().to_string(),
        source,
    })?;
    parse_type_info(&text)
}

/// Runs registration and returns the appropriate functions in one step.
pub fn admit_and_extract<'a>(
    reg: &mut Registry,
    info: &'a TypeInfo,
    max_iters: usize,
) -> (RegistrationReport, Vec<&'a FunctionSignature>) {
    let report = register_types_fixed_point(reg, info, max_iters);
    let functions = extract_appropriate_functions(reg, info);
    (report, functions)
}
