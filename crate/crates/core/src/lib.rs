//! Enumerative example generation for Python-style type annotations.
//!
//! A [`Registry`] holds the known types and aliases. Seeded enumerators
//! produce [`GeneratedValue`]s for any resolvable [`TypeExpr`], and the
//! [`pipeline`] module admits user classes as records and picks out the
//! functions whose signatures can be generated in full.
//!
//! ```
//! use typeseed::{generate_examples_str, RandomState, Registry};
//!
//! let mut reg = Registry::init_types();
//! reg.register_union("intfloatstr", &["int".parse()?, "float".parse()?, "str".parse()?])?;
//! let (values, _) = generate_examples_str(&reg, "intfloatstr", 100, RandomState::from_seed(1))?;
//! assert_eq!(values.len(), 100);
//! # Ok::<(), Box<dyn std::error::Error>>(())
//! ```

pub mod charsets;
pub mod enumerators;
pub mod expr;
pub mod generate;
pub mod pipeline;
pub mod registry;
pub mod rng;
pub mod value;
pub mod wire;

pub use expr::{parse_type_expression, ParseError, TypeExpr};
pub use generate::{
    generate_examples, generate_examples_str, generate_value, generate_value_traced, is_member, GenerateError,
};
pub use pipeline::{
    extract_appropriate_functions, load_type_info, parse_type_info, register_types_fixed_point, types_of,
    FunctionSignature, IngestError, RegistrationReport, TypeInfo,
};
pub use registry::{Arity, Constructor, Primitive, Registry, RegistryError, TypeDescriptor, TypeKind};
pub use rng::{RandomState, RngError, WeightVector};
pub use value::{FloatValue, GeneratedValue, ValueKind};
pub use wire::{decode_value, encode_value, WireError};
