use num_bigint::BigInt;
use num_rational::BigRational;

/// Python float modeled as an exact rational or one of four special values.
/// Positive zero is the rational 0.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum FloatValue {
    /// Always in lowest terms with a positive denominator.
    Rational(BigRational),
    Nan,
    PosInf,
    NegInf,
    NegZero,
}

impl FloatValue {
    pub fn is_special(&self) -> bool {
        !matches!(self, FloatValue::Rational(_))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum GeneratedValue {
    Int(BigInt),
    Float(FloatValue),
    Str(String),
    Bytes(Vec<u8>),
    Bool(bool),
    None,
    List(Vec<GeneratedValue>),
    Tuple(Vec<GeneratedValue>),
    /// Entries in generation order; keys are pairwise distinct.
    Map(Vec<(GeneratedValue, GeneratedValue)>),
    Record {
        class: String,
        fields: Vec<(String, GeneratedValue)>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ValueKind {
    Int,
    Float,
    Str,
    Bytes,
    Bool,
    None,
    List,
    Tuple,
    Map,
    Record,
}

impl GeneratedValue {
    pub fn kind(&self) -> ValueKind {
        match self {
            GeneratedValue::Int(_) => ValueKind::Int,
            GeneratedValue::Float(_) => ValueKind::Float,
            GeneratedValue::Str(_) => ValueKind::Str,
            GeneratedValue::Bytes(_) => ValueKind::Bytes,
            GeneratedValue::Bool(_) => ValueKind::Bool,
            GeneratedValue::None => ValueKind::None,
            GeneratedValue::List(_) => ValueKind::List,
            GeneratedValue::Tuple(_) => ValueKind::Tuple,
            GeneratedValue::Map(_) => ValueKind::Map,
            GeneratedValue::Record { .. } => ValueKind::Record,
        }
    }

    /// Nesting depth; leaves are depth 0.
    pub fn depth(&self) -> usize {
        let children: Box<dyn Iterator<Item = &GeneratedValue>> = match self {
            GeneratedValue::List(v) | GeneratedValue::Tuple(v) => Box::new(v.iter()),
            GeneratedValue::Map(entries) => Box::new(entries.iter().flat_map(|(k, v)| [k, v])),
            GeneratedValue::Record { fields, .. } => Box::new(fields.iter().map(|(_, v)| v)),
            _ => return 0,
        };
        1 + children.map(GeneratedValue::depth).max().unwrap_or(0)
    }
}
