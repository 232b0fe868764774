//! Character alphabets for the string enumerator.

use std::ops::RangeInclusive;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Category {
    Ascii,
    Emoji,
    Greek,
    MathSymbol,
    LatinDiacritic,
    CompoundEmoji,
}

impl Category {
    /// Order matches the string enumerator's pure-category cases.
    pub const ALL: [Category; 6] = [
        Category::Ascii,
        Category::Emoji,
        Category::Greek,
        Category::MathSymbol,
        Category::LatinDiacritic,
        Category::CompoundEmoji,
    ];

    /// Scalar codepoint range; `None` for compound emoji, which are drawn
    /// from [`COMPOUND_EMOJI`].
    pub fn range(self) -> Option<RangeInclusive<u32>> {
        match self {
            Category::Ascii => Some(0x00..=0x7F),
            Category::Emoji => Some(0x1F300..=0x1FAFF),
            Category::Greek => Some(0x0370..=0x03FF),
            Category::MathSymbol => Some(0x2200..=0x22FF),
            Category::LatinDiacritic => Some(0x00C0..=0x024F),
            Category::CompoundEmoji => None,
        }
    }

    /// Whether `c` may appear in a string of this category.
    pub fn contains(self, c: char) -> bool {
        match self.range() {
            Some(r) => r.contains(&(c as u32)),
            None => COMPOUND_EMOJI.iter().any(|seq| seq.contains(c)),
        }
    }
}

/// Multi-codepoint emoji: ZWJ sequences and skin-tone modifier sequences.
pub const COMPOUND_EMOJI: &[&str] = &[
    "\u{1F468}\u{200D}\u{1F469}\u{200D}\u{1F467}\u{200D}\u{1F466}",
    "\u{1F469}\u{200D}\u{2764}\u{FE0F}\u{200D}\u{1F468}",
    "\u{1F3F3}\u{FE0F}\u{200D}\u{1F308}",
    "\u{1F3F4}\u{200D}\u{2620}\u{FE0F}",
    "\u{1F469}\u{200D}\u{1F4BB}",
    "\u{1F468}\u{200D}\u{1F680}",
    "\u{1F9D1}\u{200D}\u{1F52C}",
    "\u{1F469}\u{200D}\u{1F692}",
    "\u{1F415}\u{200D}\u{1F9BA}",
    "\u{1F408}\u{200D}\u{2B1B}",
    "\u{1F9D1}\u{200D}\u{1F91D}\u{200D}\u{1F9D1}",
    "\u{1F441}\u{FE0F}\u{200D}\u{1F5E8}\u{FE0F}",
    "\u{1F636}\u{200D}\u{1F32B}\u{FE0F}",
    "\u{2764}\u{FE0F}\u{200D}\u{1F525}",
    "\u{1F3C3}\u{200D}\u{2640}\u{FE0F}",
    "\u{1F44D}\u{1F3FD}",
    "\u{1F44B}\u{1F3FF}",
    "\u{1F9D1}\u{1F3FB}\u{200D}\u{1F4BB}",
    "\u{1F469}\u{1F3FE}\u{200D}\u{1F393}",
    "\u{1F926}\u{1F3FC}\u{200D}\u{2642}\u{FE0F}",
    "\u{1F468}\u{200D}\u{1F468}\u{200D}\u{1F466}",
    "\u{1F9D4}\u{200D}\u{2640}\u{FE0F}",
    "\u{1F43B}\u{200D}\u{2744}\u{FE0F}",
    "\u{1F3CA}\u{1F3FD}\u{200D}\u{2642}\u{FE0F}",
    "\u{270A}\u{1F3FB}",
];
