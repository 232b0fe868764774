//! The type table and alias table.
//!
//! Names are case-insensitive: every name is lowercased on the way in.
//! Resolution looks in the type table first and otherwise follows the alias
//! chain, which is kept acyclic at insertion time.

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use crate::expr::{is_name_char, TypeExpr, ANONYMOUS_UNION};
use crate::rng::{RngError, WeightVector};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RegistryError {
    #[error("unresolved type '{0}'")]
    UnresolvedType(String),
    #[error("alias cycle: {}", .chain.join(" -> "))]
    AliasCycle { chain: Vec<String> },
    #[error("'{0}' cannot alias itself")]
    SelfAlias(String),
    #[error("alias '{0}' would shadow a registered type")]
    AliasShadowsType(String),
    #[error("type '{head}' expects {expected} argument(s), got {found}")]
    ArityMismatch {
        head: String,
        expected: String,
        found: usize,
    },
    #[error("'{0}' is not a valid type name")]
    InvalidName(String),
    #[error("'{0}' is reserved")]
    ReservedName(String),
    #[error("constructor {constructor:?} cannot be registered with arity {arity}")]
    ConstructorArity { constructor: Constructor, arity: Arity },
    #[error("union '{name}' needs at least 2 members, got {found}")]
    UnionTooSmall { name: String, found: usize },
    #[error("union '{name}' has {members} members but {weights} weights")]
    UnionWeightCount {
        name: String,
        members: usize,
        weights: usize,
    },
    #[error("invalid union weights: {0}")]
    UnionWeights(#[from] RngError),
    #[error("record '{record}' has duplicate field '{field}'")]
    DuplicateField { record: String, field: String },
    #[error("type '{0}' is self-referential or mutually recursive")]
    UnsupportedRecursion(String),
    #[error("redefining '{name}' would leave '{dependent}' unresolvable")]
    BreaksClosure { name: String, dependent: String },
}

/// Built-in generation rules for leaf types.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Primitive {
    Integer,
    Float,
    Bool,
    String,
    None,
    Bytes,
}

/// Built-in generation rules for parametric types.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Constructor {
    List,
    Dictionary,
    FixedTuple,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Arity {
    Fixed(usize),
    /// One or more arguments.
    Variadic,
}

impl std::fmt::Display for Arity {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Arity::Fixed(n) => write!(f, "{n}"),
            Arity::Variadic => f.write_str("1 or more"),
        }
    }
}

impl Arity {
    fn accepts(self, n: usize) -> bool {
        match self {
            Arity::Fixed(k) => k == n,
            Arity::Variadic => n >= 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TypeKind {
    Nonparametric(Primitive),
    Parametric {
        arity: Arity,
        constructor: Constructor,
    },
    Union {
        members: Vec<TypeExpr>,
        weights: Option<WeightVector>,
    },
    Record {
        fields: Vec<(String, TypeExpr)>,
    },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TypeDescriptor {
    pub name: String,
    pub kind: TypeKind,
}

impl TypeDescriptor {
    pub fn kind_name(&self) -> &'static str {
        match self.kind {
            TypeKind::Nonparametric(_) => "nonparametric",
            TypeKind::Parametric { .. } => "parametric",
            TypeKind::Union { .. } => "union",
            TypeKind::Record { .. } => "record",
        }
    }
}

/// How to generate or recognize one node of a type expression.
#[derive(Debug, Clone, Copy)]
pub enum Shape<'a> {
    Primitive(Primitive),
    List(&'a TypeExpr),
    Dictionary(&'a TypeExpr, &'a TypeExpr),
    FixedTuple(&'a [TypeExpr]),
    Union {
        members: &'a [TypeExpr],
        weights: Option<&'a WeightVector>,
    },
    Record {
        name: &'a str,
        fields: &'a [(String, TypeExpr)],
    },
}

#[derive(Debug, Clone, Default)]
pub struct Registry {
    types: BTreeMap<String, TypeDescriptor>,
    aliases: BTreeMap<String, String>,
}

fn normalize_name(name: &str) -> Result<String, RegistryError> {
    let lowered = name.to_lowercase();
    if lowered.is_empty() || !lowered.chars().all(is_name_char) {
        return Err(RegistryError::InvalidName(name.to_string()));
    }
    if lowered == ANONYMOUS_UNION {
        return Err(RegistryError::ReservedName(lowered));
    }
    Ok(lowered)
}

impl Registry {
    /// An empty registry with no types and no aliases.
    pub fn empty() -> Self {
        Self::default()
    }

    /// The baseline types: integer, float, bool, strings, none, bytes, and
    /// the list/dictionary/fixedtuple constructors, plus their common aliases.
    pub fn init_types() -> Self {
        let mut reg = Self::empty();
        let steps: [Result<(), RegistryError>; 13] = [
            reg.add_nonparametric_type("integer", Primitive::Integer),
            reg.add_alias_type("int", "integer"),
            reg.add_nonparametric_type("float", Primitive::Float),
            reg.add_nonparametric_type("bool", Primitive::Bool),
            reg.add_nonparametric_type("unicode-codepoint-string", Primitive::String),
            reg.add_alias_type("unicode", "unicode-codepoint-string"),
            reg.add_alias_type("str", "unicode-codepoint-string"),
            reg.add_alias_type("boolean", "bool"),
            reg.add_parametric_type("list", Arity::Fixed(1), Constructor::List),
            reg.add_parametric_type("dictionary", Arity::Fixed(2), Constructor::Dictionary),
            reg.add_parametric_type("fixedtuple", Arity::Variadic, Constructor::FixedTuple),
            reg.add_nonparametric_type("nonetype", Primitive::None),
            reg.add_nonparametric_type("bytes", Primitive::Bytes),
        ];
        for step in steps {
            step.expect("baseline registration is valid");
        }
        reg
    }

    pub fn add_nonparametric_type(&mut self, name: &str, rule: Primitive) -> Result<(), RegistryError> {
        let name = normalize_name(name)?;
        self.insert(TypeDescriptor {
            name,
            kind: TypeKind::Nonparametric(rule),
        })
    }

    pub fn add_parametric_type(
        &mut self,
        name: &str,
        arity: Arity,
        constructor: Constructor,
    ) -> Result<(), RegistryError> {
        let name = normalize_name(name)?;
        let compatible = match constructor {
            Constructor::List => arity == Arity::Fixed(1),
            Constructor::Dictionary => arity == Arity::Fixed(2),
            Constructor::FixedTuple => arity != Arity::Fixed(0),
        };
        if !compatible {
            return Err(RegistryError::ConstructorArity { constructor, arity });
        }
        self.insert(TypeDescriptor {
            name,
            kind: TypeKind::Parametric { arity, constructor },
        })
    }

    /// Maps `alias` to `target`. Rejects any insertion that closes a cycle,
    /// whatever its length.
    pub fn add_alias_type(&mut self, alias: &str, target: &str) -> Result<(), RegistryError> {
        let alias = normalize_name(alias)?;
        let target = normalize_name(target)?;
        if alias == target {
            return Err(RegistryError::SelfAlias(alias));
        }
        if self.types.contains_key(&alias) {
            return Err(RegistryError::AliasShadowsType(alias));
        }
        let mut chain = vec![alias.clone(), target.clone()];
        let mut cursor = &target;
        while let Some(next) = self.aliases.get(cursor) {
            chain.push(next.clone());
            if *next == alias {
                return Err(RegistryError::AliasCycle { chain });
            }
            cursor = next;
        }
        self.aliases.insert(alias, target);
        Ok(())
    }

    /// Registers a named union; generation picks a member uniformly.
    pub fn register_union(&mut self, name: &str, members: &[TypeExpr]) -> Result<(), RegistryError> {
        self.register_union_weighted(name, members, None)
    }

    /// Like [`register_union`](Self::register_union) with an optional
    /// per-member weight override.
    pub fn register_union_weighted(
        &mut self,
        name: &str,
        members: &[TypeExpr],
        weights: Option<Vec<u32>>,
    ) -> Result<(), RegistryError> {
        let name = normalize_name(name)?;
        if members.len() < 2 {
            return Err(RegistryError::UnionTooSmall {
                name,
                found: members.len(),
            });
        }
        let weights = match weights {
            Some(w) if w.len() != members.len() => {
                return Err(RegistryError::UnionWeightCount {
                    name,
                    members: members.len(),
                    weights: w.len(),
                })
            }
            Some(w) => Some(WeightVector::new(w)?),
            None => None,
        };
        for member in members {
            self.check(member)?;
            if self.mentions(member, &name) {
                return Err(RegistryError::UnsupportedRecursion(name));
            }
        }
        self.insert(TypeDescriptor {
            name,
            kind: TypeKind::Union {
                members: members.to_vec(),
                weights,
            },
        })
    }

    /// Registers a record type with fields kept in declaration order.
    pub fn register_record(
        &mut self,
        qualified_name: &str,
        fields: &[(String, TypeExpr)],
    ) -> Result<(), RegistryError> {
        let name = normalize_name(qualified_name)?;
        let mut seen = BTreeSet::new();
        for (field, ty) in fields {
            if !seen.insert(field.as_str()) {
                return Err(RegistryError::DuplicateField {
                    record: name,
                    field: field.clone(),
                });
            }
            if self.mentions(ty, &name) {
                return Err(RegistryError::UnsupportedRecursion(name));
            }
            self.check(ty)?;
        }
        if let Some(TypeDescriptor {
            kind: TypeKind::Record { fields: old },
            ..
        }) = self.types.get(&name)
        {
            if old.as_slice() != fields {
                log::warn!("record '{name}' re-registered with different fields");
            }
        }
        self.insert(TypeDescriptor {
            name,
            kind: TypeKind::Record {
                fields: fields.to_vec(),
            },
        })
    }

    /// Table-set insertion. A definition that would leave an existing union
    /// or record unresolvable is rolled back.
    fn insert(&mut self, desc: TypeDescriptor) -> Result<(), RegistryError> {
        let name = desc.name.clone();
        let previous_type = self.types.insert(name.clone(), desc);
        let previous_alias = self.aliases.remove(&name);
        if previous_type.is_none() && previous_alias.is_none() {
            return Ok(());
        }
        if let Some(dependent) = self.first_unclosed() {
            match previous_type {
                Some(old) => self.types.insert(name.clone(), old),
                None => self.types.remove(&name),
            };
            if let Some(target) = previous_alias {
                self.aliases.insert(name.clone(), target);
            }
            return Err(RegistryError::BreaksClosure { name, dependent });
        }
        Ok(())
    }

    fn first_unclosed(&self) -> Option<String> {
        self.types.values().find_map(|desc| {
            let broken = match &desc.kind {
                TypeKind::Union { members, .. } => members
                    .iter()
                    .any(|m| self.check(m).is_err() || self.mentions(m, &desc.name)),
                TypeKind::Record { fields } => fields
                    .iter()
                    .any(|(_, t)| self.check(t).is_err() || self.mentions(t, &desc.name)),
                _ => false,
            };
            broken.then(|| desc.name.clone())
        })
    }

    /// Follows aliases to the canonical registered name.
    pub fn canonical_name(&self, name: &str) -> Result<String, RegistryError> {
        let mut cursor = name.to_lowercase();
        loop {
            if self.types.contains_key(&cursor) {
                return Ok(cursor);
            }
            match self.aliases.get(&cursor) {
                Some(next) => cursor = next.clone(),
                None => return Err(RegistryError::UnresolvedType(name.to_lowercase())),
            }
        }
    }

    /// End of the alias chain starting at `name`, registered or not.
    fn alias_terminal<'a>(&'a self, name: &'a str) -> &'a str {
        let mut cursor = name;
        while let Some(next) = self.aliases.get(cursor) {
            cursor = next;
        }
        cursor
    }

    pub fn resolve(&self, name: &str) -> Result<&TypeDescriptor, RegistryError> {
        let canonical = self.canonical_name(name)?;
        Ok(&self.types[&canonical])
    }

    /// The generation shape of the outermost node of `expr`, with arity checked.
    /// Arguments are not resolved.
    pub fn shape<'a>(&'a self, expr: &'a TypeExpr) -> Result<Shape<'a>, RegistryError> {
        let args = expr.args();
        if expr.is_anonymous_union() {
            return Ok(Shape::Union {
                members: args,
                weights: None,
            });
        }
        let desc = self.resolve(expr.head())?;
        let arity_error = |expected: String| RegistryError::ArityMismatch {
            head: expr.head().to_string(),
            expected,
            found: args.len(),
        };
        match &desc.kind {
            TypeKind::Parametric { arity, constructor } => {
                if !arity.accepts(args.len()) {
                    return Err(arity_error(arity.to_string()));
                }
                Ok(match constructor {
                    Constructor::List => Shape::List(&args[0]),
                    Constructor::Dictionary => Shape::Dictionary(&args[0], &args[1]),
                    Constructor::FixedTuple => Shape::FixedTuple(args),
                })
            }
            _ if !args.is_empty() => Err(arity_error("0".to_string())),
            TypeKind::Nonparametric(p) => Ok(Shape::Primitive(*p)),
            TypeKind::Union { members, weights } => Ok(Shape::Union {
                members,
                weights: weights.as_ref(),
            }),
            TypeKind::Record { fields } => Ok(Shape::Record {
                name: &desc.name,
                fields,
            }),
        }
    }

    /// Checks that `expr` and all of its arguments resolve with correct arity.
    pub fn check(&self, expr: &TypeExpr) -> Result<(), RegistryError> {
        self.shape(expr)?;
        expr.args().iter().try_for_each(|arg| self.check(arg))
    }

    pub fn resolves(&self, expr: &TypeExpr) -> bool {
        self.check(expr).is_ok()
    }

    /// Whether generating `expr` could reach the type named `target`.
    fn mentions(&self, expr: &TypeExpr, target: &str) -> bool {
        let mut visited = BTreeSet::new();
        self.mentions_inner(expr, target, &mut visited)
    }

    fn mentions_inner(&self, expr: &TypeExpr, target: &str, visited: &mut BTreeSet<String>) -> bool {
        if expr.args().iter().any(|a| self.mentions_inner(a, target, visited)) {
            return true;
        }
        if expr.is_anonymous_union() {
            return false;
        }
        let Ok(canonical) = self.canonical_name(expr.head()) else {
            return self.alias_terminal(expr.head()) == target;
        };
        if canonical == target {
            return true;
        }
        if !visited.insert(canonical.clone()) {
            return false;
        }
        match &self.types[&canonical].kind {
            TypeKind::Union { members, .. } => members.iter().any(|m| self.mentions_inner(m, target, visited)),
            TypeKind::Record { fields } => fields.iter().any(|(_, t)| self.mentions_inner(t, target, visited)),
            _ => false,
        }
    }

    pub fn types(&self) -> impl Iterator<Item = &TypeDescriptor> {
        self.types.values()
    }

    pub fn aliases(&self) -> impl Iterator<Item = (&str, &str)> {
        self.aliases.iter().map(|(a, t)| (a.as_str(), t.as_str()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse_type_expression;

    fn ty(s: &str) -> TypeExpr {
        parse_type_expression(s).unwrap()
    }

    #[test]
    fn baseline_aliases_resolve() {
        let reg = Registry::init_types();
        assert_eq!(reg.resolve("int").unwrap().name, "integer");
        assert_eq!(reg.resolve("str").unwrap().name, "unicode-codepoint-string");
        assert_eq!(reg.resolve("unicode").unwrap().name, "unicode-codepoint-string");
        assert_eq!(reg.resolve("boolean").unwrap().name, "bool");
        assert_eq!(
            reg.resolve("nonetype").unwrap().kind,
            TypeKind::Nonparametric(Primitive::None)
        );
        assert_eq!(
            reg.resolve("nosuchtype"),
            Err(RegistryError::UnresolvedType("nosuchtype".into()))
        );
    }

    #[test]
    fn lookups_are_case_insensitive() {
        let mut reg = Registry::init_types();
        reg.add_nonparametric_type("FLOAT", Primitive::Float).unwrap();
        assert_eq!(reg.resolve("Float").unwrap().name, "float");
        assert_eq!(reg.resolve("INT").unwrap().name, "integer");
    }

    #[test]
    fn reregistration_overwrites() {
        let mut reg = Registry::empty();
        reg.add_nonparametric_type("x", Primitive::Integer).unwrap();
        reg.add_nonparametric_type("x", Primitive::Bytes).unwrap();
        assert_eq!(
            reg.resolve("x").unwrap().kind,
            TypeKind::Nonparametric(Primitive::Bytes)
        );
    }

    #[test]
    fn parametric_arity_checked_at_resolution() {
        let reg = Registry::init_types();
        assert!(reg.check(&ty("list[int]")).is_ok());
        assert!(reg.check(&ty("dictionary[str,int]")).is_ok());
        assert!(reg.check(&ty("fixedtuple[int,float,str]")).is_ok());
        assert!(matches!(
            reg.check(&ty("list[int,int]")),
            Err(RegistryError::ArityMismatch { .. })
        ));
        assert!(matches!(
            reg.check(&ty("list")),
            Err(RegistryError::ArityMismatch { .. })
        ));
        assert!(matches!(
            reg.check(&ty("int[str]")),
            Err(RegistryError::ArityMismatch { .. })
        ));
        assert_eq!(
            reg.check(&ty("list[weird]")),
            Err(RegistryError::UnresolvedType("weird".into()))
        );
    }

    #[test]
    fn constructor_arity_must_match() {
        let mut reg = Registry::init_types();
        assert!(reg
            .add_parametric_type("pair", Arity::Fixed(1), Constructor::Dictionary)
            .is_err());
        reg.add_parametric_type("seq", Arity::Fixed(1), Constructor::List)
            .unwrap();
        assert!(reg.resolves(&ty("seq[int]")));
    }

    #[test]
    fn two_and_three_cycles_rejected() {
        let mut reg = Registry::empty();
        reg.add_alias_type("a", "b").unwrap();
        let err = reg.add_alias_type("b", "a").unwrap_err();
        assert_eq!(
            err,
            RegistryError::AliasCycle {
                chain: vec!["b".into(), "a".into(), "b".into()]
            }
        );

        let mut reg = Registry::empty();
        reg.add_alias_type("a", "b").unwrap();
        reg.add_alias_type("b", "c").unwrap();
        assert!(matches!(
            reg.add_alias_type("C", "A"),
            Err(RegistryError::AliasCycle { .. })
        ));
        assert!(matches!(reg.add_alias_type("a", "A"), Err(RegistryError::SelfAlias(_))));
    }

    #[test]
    fn alias_may_not_shadow_type() {
        let mut reg = Registry::init_types();
        assert_eq!(
            reg.add_alias_type("float", "integer"),
            Err(RegistryError::AliasShadowsType("float".into()))
        );
    }

    #[test]
    fn union_registration() {
        let mut reg = Registry::init_types();
        reg.register_union("intfloatstr", &[ty("int"), ty("float"), ty("str")])
            .unwrap();
        assert_eq!(reg.resolve("IntFloatStr").unwrap().kind_name(), "union");
        assert!(matches!(
            reg.register_union("solo", &[ty("int")]),
            Err(RegistryError::UnionTooSmall { found: 1, .. })
        ));
        assert_eq!(
            reg.register_union("bad", &[ty("int"), ty("weird")]),
            Err(RegistryError::UnresolvedType("weird".into()))
        );
        assert!(reg
            .register_union_weighted("w", &[ty("int"), ty("str")], Some(vec![1]))
            .is_err());
        assert!(reg
            .register_union_weighted("w", &[ty("int"), ty("str")], Some(vec![0, 1]))
            .is_err());
        assert!(reg.register_union("union", &[ty("int"), ty("str")]).is_err());
    }

    #[test]
    fn records_from_class_fixture() {
        let mut reg = Registry::init_types();
        reg.register_record(
            "ClassTest.TestClassA",
            &[("a".into(), ty("float")), ("b".into(), ty("list[int]"))],
        )
        .unwrap();
        reg.register_record(
            "classtest.testclassb",
            &[("a".into(), ty("int")), ("b".into(), ty("classtest.testclassa"))],
        )
        .unwrap();
        let b = reg.resolve("classtest.testclassb").unwrap();
        match &b.kind {
            TypeKind::Record { fields } => assert_eq!(fields[1].0, "b"),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn records_reject_unresolved_and_recursive_fields() {
        let mut reg = Registry::init_types();
        assert_eq!(
            reg.register_record("m.c", &[("x".into(), ty("weirdtype"))]),
            Err(RegistryError::UnresolvedType("weirdtype".into()))
        );
        assert_eq!(
            reg.register_record("m.node", &[("next".into(), ty("list[m.node]"))]),
            Err(RegistryError::UnsupportedRecursion("m.node".into()))
        );
        assert!(matches!(
            reg.register_record("m.d", &[("x".into(), ty("int")), ("x".into(), ty("str"))]),
            Err(RegistryError::DuplicateField { .. })
        ));
    }

    #[test]
    fn mutual_recursion_through_redefinition_rejected() {
        let mut reg = Registry::init_types();
        reg.register_record("m.a", &[("x".into(), ty("int"))]).unwrap();
        reg.register_record("m.b", &[("a".into(), ty("m.a"))]).unwrap();
        assert_eq!(
            reg.register_record("m.a", &[("b".into(), ty("m.b"))]),
            Err(RegistryError::UnsupportedRecursion("m.a".into()))
        );
        assert!(reg.resolves(&ty("m.b")));
    }

    #[test]
    fn redefinition_breaking_dependents_rolls_back() {
        let mut reg = Registry::init_types();
        reg.register_record("m.a", &[("x".into(), ty("list[int]"))]).unwrap();
        let err = reg.add_nonparametric_type("list", Primitive::Integer).unwrap_err();
        assert!(matches!(err, RegistryError::BreaksClosure { .. }));
        assert!(reg.resolves(&ty("list[int]")));
    }

    #[test]
    fn registering_over_alias_replaces_it() {
        let mut reg = Registry::init_types();
        reg.add_nonparametric_type("int", Primitive::Bool).unwrap();
        assert_eq!(reg.resolve("int").unwrap().name, "int");
        assert!(reg.aliases().all(|(a, _)| a != "int"));
    }

    #[test]
    fn anonymous_unions_resolve_structurally() {
        let reg = Registry::init_types();
        assert!(reg.resolves(&ty("int | nonetype")));
        assert!(!reg.resolves(&ty("int | weird")));
    }
}
