//! Example generation and membership checking for arbitrary type expressions.

use thiserror::Error;

use crate::enumerators::{
    draw_length, enum_bytes_traced, enum_float_traced, enum_int_traced, enum_string_traced, Enumerator, NoTrace,
    TraceSink,
};
use crate::expr::{parse_type_expression, ParseError, TypeExpr};
use crate::registry::{Primitive, Registry, RegistryError, Shape};
use crate::rng::RandomState;
use crate::value::{FloatValue, GeneratedValue};

/// Upper bound on list and dictionary lengths.
pub const MAX_CONTAINER_LEN: usize = 64;

/// Attempts to draw a fresh dictionary key before giving up on an entry.
const KEY_RETRIES: usize = 16;

/// Registered types cannot recurse, so this is never reached in practice.
const MAX_DEPTH: usize = 256;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GenerateError {
    #[error(transparent)]
    Registry(#[from] RegistryError),
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error("internal error: generation exceeded depth {0}")]
    DepthExceeded(usize),
}

pub fn generate_value(
    reg: &Registry,
    ty: &TypeExpr,
    state: RandomState,
) -> Result<(GeneratedValue, RandomState), GenerateError> {
    generate_value_traced(reg, ty, state, &mut NoTrace)
}

pub fn generate_value_traced<T: TraceSink + ?Sized>(
    reg: &Registry,
    ty: &TypeExpr,
    state: RandomState,
    trace: &mut T,
) -> Result<(GeneratedValue, RandomState), GenerateError> {
    Generator { reg, trace }.value(ty, state, 0)
}

/// `n` values of `ty`, threading the state from one to the next.
pub fn generate_examples(
    reg: &Registry,
    ty: &TypeExpr,
    n: usize,
    state: RandomState,
) -> Result<(Vec<GeneratedValue>, RandomState), GenerateError> {
    reg.check(ty)?;
    let mut out = Vec::with_capacity(n);
    let mut state = state;
    for _ in 0..n {
        let (v, next) = generate_value(reg, ty, state)?;
        out.push(v);
        state = next;
    }
    Ok((out, state))
}

/// [`generate_examples`] for a type written in the text grammar.
pub fn generate_examples_str(
    reg: &Registry,
    ty: &str,
    n: usize,
    state: RandomState,
) -> Result<(Vec<GeneratedValue>, RandomState), GenerateError> {
    generate_examples(reg, &parse_type_expression(ty)?, n, state)
}

struct Generator<'r, 't, T: ?Sized> {
    reg: &'r Registry,
    trace: &'t mut T,
}

impl<T: TraceSink + ?Sized> Generator<'_, '_, T> {
    fn value(
        &mut self,
        ty: &TypeExpr,
        state: RandomState,
        depth: usize,
    ) -> Result<(GeneratedValue, RandomState), GenerateError> {
        if depth > MAX_DEPTH {
            return Err(GenerateError::DepthExceeded(MAX_DEPTH));
        }
        let depth = depth + 1;
        Ok(match self.reg.shape(ty)? {
            Shape::Primitive(p) => self.primitive(p, state),
            Shape::List(elem) => {
                let (len, mut state) = draw_length(state, MAX_CONTAINER_LEN, self.trace);
                let mut items = Vec::with_capacity(len);
                for _ in 0..len {
                    let (v, next) = self.value(elem, state, depth)?;
                    items.push(v);
                    state = next;
                }
                (GeneratedValue::List(items), state)
            }
            Shape::Dictionary(key_ty, val_ty) => {
                let (len, mut state) = draw_length(state, MAX_CONTAINER_LEN, self.trace);
                let mut entries: Vec<(GeneratedValue, GeneratedValue)> = Vec::with_capacity(len);
                for _ in 0..len {
                    let mut fresh = None;
                    for _ in 0..=KEY_RETRIES {
                        let (k, next) = self.value(key_ty, state, depth)?;
                        state = next;
                        if entries.iter().all(|(seen, _)| *seen != k) {
                            fresh = Some(k);
                            break;
                        }
                    }
                    let Some(key) = fresh else { continue };
                    let (v, next) = self.value(val_ty, state, depth)?;
                    state = next;
                    entries.push((key, v));
                }
                (GeneratedValue::Map(entries), state)
            }
            Shape::FixedTuple(elems) => {
                let (items, state) = self.sequence(elems.iter(), state, depth)?;
                (GeneratedValue::Tuple(items), state)
            }
            Shape::Union { members, weights } => {
                let (i, state) = match weights {
                    Some(w) => state.weighted_switch(w),
                    None => {
                        let (i, s) = state.below(members.len() as u64);
                        (i as usize, s)
                    }
                };
                self.trace.record(Enumerator::Union, i);
                self.value(&members[i], state, depth)?
            }
            Shape::Record { name, fields } => {
                let (values, state) = self.sequence(fields.iter().map(|(_, t)| t), state, depth)?;
                let fields = fields.iter().map(|(f, _)| f.clone()).zip(values).collect();
                (
                    GeneratedValue::Record {
                        class: name.to_string(),
                        fields,
                    },
                    state,
                )
            }
        })
    }

    fn sequence<'a>(
        &mut self,
        types: impl Iterator<Item = &'a TypeExpr>,
        mut state: RandomState,
        depth: usize,
    ) -> Result<(Vec<GeneratedValue>, RandomState), GenerateError> {
        let mut out = Vec::new();
        for ty in types {
            let (v, next) = self.value(ty, state, depth)?;
            out.push(v);
            state = next;
        }
        Ok((out, state))
    }

    fn primitive(&mut self, p: Primitive, state: RandomState) -> (GeneratedValue, RandomState) {
        match p {
            Primitive::Integer => {
                let (v, s) = enum_int_traced(state, self.trace);
                (GeneratedValue::Int(v), s)
            }
            Primitive::Float => {
                let (v, s) = enum_float_traced(state, self.trace);
                (GeneratedValue::Float(v), s)
            }
            Primitive::String => {
                let (v, s) = enum_string_traced(state, self.trace);
                (GeneratedValue::Str(v), s)
            }
            Primitive::Bytes => {
                let (v, s) = enum_bytes_traced(state, self.trace);
                (GeneratedValue::Bytes(v), s)
            }
            Primitive::Bool => {
                let (v, s) = state.random_bool();
                (GeneratedValue::Bool(v), s)
            }
            Primitive::None => (GeneratedValue::None, state),
        }
    }
}

/// Whether `v` structurally conforms to `ty`. Fails if `ty` does not resolve.
pub fn is_member(reg: &Registry, v: &GeneratedValue, ty: &TypeExpr) -> Result<bool, RegistryError> {
    reg.check(ty)?;
    member(reg, v, ty)
}

fn member(reg: &Registry, v: &GeneratedValue, ty: &TypeExpr) -> Result<bool, RegistryError> {
    use GeneratedValue as V;
    Ok(match (reg.shape(ty)?, v) {
        (Shape::Primitive(p), v) => {
            matches!(
                (p, v),
                (Primitive::Integer, V::Int(_))
                    | (Primitive::Float, V::Float(_))
                    | (Primitive::String, V::Str(_))
                    | (Primitive::Bytes, V::Bytes(_))
                    | (Primitive::Bool, V::Bool(_))
                    | (Primitive::None, V::None)
            ) && float_is_canonical(v)
        }
        (Shape::List(elem), V::List(items)) => all_members(reg, items.iter().map(|i| (i, elem)))?,
        (Shape::FixedTuple(elems), V::Tuple(items)) => {
            items.len() == elems.len() && all_members(reg, items.iter().zip(elems))?
        }
        (Shape::Dictionary(k, val), V::Map(entries)) => {
            let distinct = entries
                .iter()
                .enumerate()
                .all(|(i, (a, _))| entries[..i].iter().all(|(b, _)| a != b));
            distinct
                && all_members(reg, entries.iter().map(|(key, _)| (key, k)))?
                && all_members(reg, entries.iter().map(|(_, v)| (v, val)))?
        }
        (Shape::Union { members, .. }, v) => {
            for m in members {
                if member(reg, v, m)? {
                    return Ok(true);
                }
            }
            false
        }
        (Shape::Record { name, fields: declared }, V::Record { class, fields }) => {
            class == name
                && fields.len() == declared.len()
                && fields.iter().zip(declared).all(|((f, _), (d, _))| f == d)
                && all_members(reg, fields.iter().map(|(_, v)| v).zip(declared.iter().map(|(_, t)| t)))?
        }
        _ => false,
    })
}

fn float_is_canonical(v: &GeneratedValue) -> bool {
    match v {
        GeneratedValue::Float(FloatValue::Rational(r)) => {
            use num_traits::{One, Signed};
            r.denom().is_positive() && num_integer::Integer::gcd(r.numer(), r.denom()).is_one()
        }
        _ => true,
    }
}

fn all_members<'a>(
    reg: &Registry,
    pairs: impl Iterator<Item = (&'a GeneratedValue, &'a TypeExpr)>,
) -> Result<bool, RegistryError> {
    for (v, t) in pairs {
        if !member(reg, v, t)? {
            return Ok(false);
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use num_bigint::BigInt;
    use num_rational::BigRational;

    use super::*;
    use crate::value::ValueKind;

    fn ty(s: &str) -> TypeExpr {
        parse_type_expression(s).unwrap()
    }

    fn classtest_registry() -> Registry {
        let mut reg = Registry::init_types();
        reg.register_record(
            "classtest.testclassa",
            &[("a".into(), ty("float")), ("b".into(), ty("list[int]"))],
        )
        .unwrap();
        reg.register_record(
            "classtest.testclassb",
            &[("a".into(), ty("int")), ("b".into(), ty("classtest.testclassa"))],
        )
        .unwrap();
        reg
    }

    #[test]
    fn fixed_tuple_shape() {
        let reg = Registry::init_types();
        let (v, _) = generate_value(&reg, &ty("fixedtuple[float, list[int]]"), RandomState::from_seed(1)).unwrap();
        let GeneratedValue::Tuple(items) = v else {
            panic!("{v:?}")
        };
        assert_eq!(items.len(), 2);
        assert_eq!(items[0].kind(), ValueKind::Float);
        let GeneratedValue::List(ints) = &items[1] else {
            panic!()
        };
        assert!(ints.iter().all(|i| i.kind() == ValueKind::Int));
    }

    #[test]
    fn nested_record_shape() {
        let reg = classtest_registry();
        let (v, _) = generate_value(&reg, &ty("classtest.testclassb"), RandomState::from_seed(2)).unwrap();
        let GeneratedValue::Record { class, fields } = &v else {
            panic!()
        };
        assert_eq!(class, "classtest.testclassb");
        assert_eq!(fields[0].0, "a");
        assert_eq!(fields[0].1.kind(), ValueKind::Int);
        match &fields[1].1 {
            GeneratedValue::Record { class, fields } => {
                assert_eq!(class, "classtest.testclassa");
                assert_eq!(fields.iter().map(|(n, _)| n.as_str()).collect::<Vec<_>>(), ["a", "b"]);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn list_of_none_is_all_none() {
        let reg = Registry::init_types();
        let found = (0..1000).map(RandomState::from_seed).find_map(|s| {
            let (v, _) = generate_value(&reg, &ty("list[nonetype]"), s).unwrap();
            match v {
                GeneratedValue::List(items) if items.len() == 3 => Some(items),
                _ => None,
            }
        });
        assert_eq!(found.unwrap(), vec![GeneratedValue::None; 3]);
    }

    #[test]
    fn examples_count_and_state_threading() {
        let reg = Registry::init_types();
        let s = RandomState::from_seed(1);
        let (floats, _) = generate_examples_str(&reg, "float", 100, s).unwrap();
        assert_eq!(floats.len(), 100);
        assert!(floats.iter().all(|v| v.kind() == ValueKind::Float));

        let (none, after) = generate_examples_str(&reg, "list[int]", 0, s).unwrap();
        assert!(none.is_empty());
        assert_eq!(after, s);
    }

    #[test]
    fn union_examples_are_members() {
        let mut reg = Registry::init_types();
        reg.register_union("intfloatstr", &[ty("int"), ty("float"), ty("str")])
            .unwrap();
        let (vals, _) = generate_examples_str(&reg, "intfloatstr", 100, RandomState::from_seed(1)).unwrap();
        assert_eq!(vals.len(), 100);
        assert!(vals
            .iter()
            .all(|v| matches!(v.kind(), ValueKind::Int | ValueKind::Float | ValueKind::Str)));
    }

    #[test]
    fn union_member_frequencies_are_uniform() {
        let mut reg = Registry::init_types();
        reg.register_union("intfloatstr", &[ty("int"), ty("float"), ty("str")])
            .unwrap();
        let (vals, _) = generate_examples_str(&reg, "intfloatstr", 100_000, RandomState::from_seed(9)).unwrap();
        for kind in [ValueKind::Int, ValueKind::Float, ValueKind::Str] {
            let f = vals.iter().filter(|v| v.kind() == kind).count() as f64 / 1e5;
            assert!((f - 1.0 / 3.0).abs() < 0.01, "{kind:?}: {f}");
        }
    }

    #[test]
    fn weighted_union_override() {
        let mut reg = Registry::init_types();
        reg.register_union_weighted("mostlyint", &[ty("int"), ty("nonetype")], Some(vec![9, 1]))
            .unwrap();
        let (vals, _) = generate_examples_str(&reg, "mostlyint", 20_000, RandomState::from_seed(9)).unwrap();
        let f = vals.iter().filter(|v| v.kind() == ValueKind::None).count() as f64 / 20_000.0;
        assert!((f - 0.1).abs() < 0.01);
    }

    #[test]
    fn dictionary_keys_distinct_even_for_tiny_key_space() {
        let reg = Registry::init_types();
        let mut state = RandomState::from_seed(3);
        for _ in 0..500 {
            let (v, next) = generate_value(&reg, &ty("dictionary[bool, int]"), state).unwrap();
            state = next;
            let GeneratedValue::Map(entries) = v else { panic!() };
            assert!(entries.len() <= 2);
        }
    }

    #[test]
    fn containers_are_capped() {
        let reg = Registry::init_types();
        let mut state = RandomState::from_seed(3);
        for _ in 0..2000 {
            let (v, next) = generate_value(&reg, &ty("list[nonetype]"), state).unwrap();
            state = next;
            let GeneratedValue::List(items) = v else { panic!() };
            assert!(items.len() <= MAX_CONTAINER_LEN);
        }
    }

    #[test]
    fn unresolved_types_error() {
        let reg = Registry::init_types();
        assert_eq!(
            generate_value(&reg, &ty("list[nosuch]"), RandomState::from_seed(1)).unwrap_err(),
            GenerateError::Registry(RegistryError::UnresolvedType("nosuch".into()))
        );
        assert!(is_member(&reg, &GeneratedValue::List(vec![]), &ty("list[nosuch]")).is_err());
    }

    #[test]
    fn membership_basics() {
        let reg = Registry::init_types();
        let zero = GeneratedValue::Int(BigInt::from(0));
        assert!(is_member(&reg, &zero, &ty("int")).unwrap());
        assert!(!is_member(&reg, &zero, &ty("str")).unwrap());
        assert!(is_member(&reg, &GeneratedValue::Float(FloatValue::Nan), &ty("float")).unwrap());
        assert!(is_member(&reg, &zero, &ty("str | int")).unwrap());
        let tuple = GeneratedValue::Tuple(vec![zero.clone()]);
        assert!(!is_member(&reg, &tuple, &ty("fixedtuple[int, int]")).unwrap());
        let dup = GeneratedValue::Map(vec![(zero.clone(), zero.clone()), (zero.clone(), zero.clone())]);
        assert!(!is_member(&reg, &dup, &ty("dictionary[int,int]")).unwrap());
        let unreduced = GeneratedValue::Float(FloatValue::Rational(BigRational::new_raw(2.into(), 4.into())));
        assert!(!is_member(&reg, &unreduced, &ty("float")).unwrap());
    }

    #[test]
    fn record_membership_requires_exact_fields() {
        let reg = classtest_registry();
        let (v, _) = generate_value(&reg, &ty("classtest.testclassa"), RandomState::from_seed(4)).unwrap();
        assert!(is_member(&reg, &v, &ty("classtest.testclassa")).unwrap());
        assert!(!is_member(&reg, &v, &ty("classtest.testclassb")).unwrap());
        let GeneratedValue::Record { class, mut fields } = v else {
            panic!()
        };
        fields.swap(0, 1);
        assert!(!is_member(
            &reg,
            &GeneratedValue::Record { class, fields },
            &ty("classtest.testclassa")
        )
        .unwrap());
    }

    #[test]
    fn generation_is_deterministic() {
        let reg = classtest_registry();
        let t = ty("dictionary[str, list[classtest.testclassb]]");
        let a = generate_examples(&reg, &t, 20, RandomState::from_seed(5)).unwrap();
        let b = generate_examples(&reg, &t, 20, RandomState::from_seed(5)).unwrap();
        assert_eq!(a, b);
    }
}
