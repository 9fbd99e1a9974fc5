use serde::{Deserialize, Serialize};

use super::chunks::{words, SubtitleChunk};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum ScriptClass {
    Bengali,
    Latin,
    Devanagari,
    Arabic,
    Malayalam,
    Telugu,
    Neutral,
    Other,
}

impl ScriptClass {
    /// Higher wins a majority tie, so ties lean away from Bengali.
    fn tie_rank(self) -> u8 {
        match self {
            ScriptClass::Bengali => 0,
            ScriptClass::Latin => 1,
            ScriptClass::Devanagari => 2,
            ScriptClass::Telugu => 3,
            ScriptClass::Malayalam => 4,
            ScriptClass::Arabic => 5,
            ScriptClass::Other => 6,
            ScriptClass::Neutral => 7,
        }
    }
}

fn class_of(c: char) -> ScriptClass {
    match c {
        // Dandas live in the Devanagari block but are shared sentence punctuation.
        '\u{0964}' | '\u{0965}' => ScriptClass::Neutral,
        '\u{0980}'..='\u{09FF}' => ScriptClass::Bengali,
        '\u{0900}'..='\u{097F}' => ScriptClass::Devanagari,
        '\u{0600}'..='\u{06FF}' | '\u{0750}'..='\u{077F}' => ScriptClass::Arabic,
        '\u{0D00}'..='\u{0D7F}' => ScriptClass::Malayalam,
        '\u{0C00}'..='\u{0C7F}' => ScriptClass::Telugu,
        c if c.is_ascii_alphabetic() => ScriptClass::Latin,
        c if c.is_ascii() => ScriptClass::Neutral,
        c if c.is_alphanumeric() => ScriptClass::Other,
        _ => ScriptClass::Neutral,
    }
}

/// Majority script among the token's codepoints, ignoring neutral ones
/// (ASCII digits and punctuation, whitespace, symbols, joiners). A token with
/// no script-bearing codepoint is `Neutral`. Ties resolve toward
/// Other > Arabic > Malayalam > Telugu > Devanagari > Latin > Bengali.
pub fn classify_token_script(token: &str) -> ScriptClass {
    let mut counts = [0usize; 8];
    for c in token.chars() {
        let class = class_of(c);
        if class != ScriptClass::Neutral {
            counts[class.tie_rank() as usize] += 1;
        }
    }
    let (rank, &n) = counts
        .iter()
        .enumerate()
        // max_by_key keeps the last maximum, i.e. the highest tie rank.
        .max_by_key(|&(_, n)| *n)
        .expect("non-empty array");
    if n == 0 {
        return ScriptClass::Neutral;
    }
    [
        ScriptClass::Bengali,
        ScriptClass::Latin,
        ScriptClass::Devanagari,
        ScriptClass::Telugu,
        ScriptClass::Malayalam,
        ScriptClass::Arabic,
        ScriptClass::Other,
    ][rank]
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum LanguageDecision {
    Keep,
    /// Word positions (whitespace tokens) classified Devanagari.
    NeedsReplacement(Vec<usize>),
    Drop,
}

/// Keep Bengali/Latin/Neutral text, request replacement of Devanagari words,
/// drop anything with Arabic, Malayalam, Telugu or other-script words (drop
/// wins over replacement). Non-speech chunks are kept.
pub fn filter_language(chunk: &SubtitleChunk) -> LanguageDecision {
    let Some(text) = chunk.text.as_deref() else {
        return LanguageDecision::Keep;
    };
    let mut positions = Vec::new();
    for (i, w) in words(text).into_iter().enumerate() {
        match classify_token_script(w) {
            ScriptClass::Bengali | ScriptClass::Latin | ScriptClass::Neutral => {}
            ScriptClass::Devanagari => positions.push(i),
            _ => return LanguageDecision::Drop,
        }
    }
    if positions.is_empty() {
        LanguageDecision::Keep
    } else {
        LanguageDecision::NeedsReplacement(positions)
    }
}
