//! English noun inflection for lexicon terms.
//!
//! Only the head (last) word of a multi-word term is inflected. The tables
//! are small and tuned to animal and product names; anything that the
//! suffix rules would get wrong in either direction belongs in
//! [`IRREGULAR`].

/// Singular/plural pairs handled before any suffix rule. Some entries are
/// regular going forward but ambiguous to undo (`ibises`, `rhinoceroses`).
const IRREGULAR: &[(&str, &str)] = &[
    ("goose", "geese"),
    ("mouse", "mice"),
    ("dormouse", "dormice"),
    ("louse", "lice"),
    ("tooth", "teeth"),
    ("foot", "feet"),
    ("ox", "oxen"),
    ("child", "children"),
    ("person", "people"),
    ("man", "men"),
    ("woman", "women"),
    ("ibis", "ibises"),
    ("mantis", "mantises"),
    ("loris", "lorises"),
    ("rhinoceros", "rhinoceroses"),
    ("magpie", "magpies"),
    ("budgie", "budgies"),
    ("collie", "collies"),
    ("axolotl", "axolotls"),
];

/// Words whose plural is the same as the singular, including mass nouns.
const INVARIANT: &[&str] = &[
    "species",
    "series",
    "fish",
    "sheep",
    "deer",
    "moose",
    "bison",
    "cattle",
    "swine",
    "salmon",
    "trout",
    "grouse",
    "ivory",
    "meat",
    "bushmeat",
    "aircraft",
    "offspring",
];

/// `f`/`fe` endings that become `ves`.
const F_TO_VES: &[(&str, &str)] = &[
    ("wolf", "wolves"),
    ("calf", "calves"),
    ("leaf", "leaves"),
    ("half", "halves"),
    ("knife", "knives"),
    ("life", "lives"),
    ("wife", "wives"),
    ("loaf", "loaves"),
    ("shelf", "shelves"),
    ("thief", "thieves"),
];

/// `o` endings that take `es`.
const O_TO_OES: &[&str] = &["buffalo", "mosquito", "potato", "tomato", "hero", "echo", "torpedo"];

fn split_head(term: &str) -> (&str, &str) {
    match term.rfind(' ') {
        Some(i) => term.split_at(i + 1),
        None => ("", term),
    }
}

/// Nouns in -u or -i, whose plurals in -us and -is would otherwise read as
/// singulars.
const VOWEL_PLUS_S: &[&str] = &[
    "caribou", "emu", "gnu", "kinkajou", "kudu", "zebu", "kiwi", "okapi", "wapiti",
];

fn is_vowel(c: char) -> bool {
    matches!(c, 'a' | 'e' | 'i' | 'o' | 'u')
}

/// Plural of a lowercase noun phrase, inflecting the last word.
pub fn pluralize(singular: &str) -> String {
    let (prefix, head) = split_head(singular);
    format!("{prefix}{}", pluralize_word(head))
}

fn pluralize_word(word: &str) -> String {
    if word.is_empty() || INVARIANT.contains(&word) {
        return word.to_string();
    }
    if let Some((_, plural)) = IRREGULAR.iter().find(|(s, _)| *s == word) {
        return (*plural).to_string();
    }
    if let Some(stem) = word.strip_suffix('y') {
        if stem.chars().last().is_some_and(|c| !is_vowel(c)) {
            return format!("{stem}ies");
        }
    }
    if ["s", "x", "z", "ch", "sh"].iter().any(|end| word.ends_with(end)) {
        return format!("{word}es");
    }
    if let Some((_, plural)) = F_TO_VES.iter().find(|(s, _)| *s == word) {
        return (*plural).to_string();
    }
    if O_TO_OES.contains(&word) {
        return format!("{word}es");
    }
    format!("{word}s")
}

/// Undoes [`pluralize`] without consulting a lexicon. Input is lowercased.
pub fn singularize_rules(surface: &str) -> String {
    let lower = surface.to_lowercase();
    let (prefix, head) = split_head(&lower);
    format!("{prefix}{}", singularize_word(head))
}

fn singularize_word(word: &str) -> String {
    if word.is_empty() || INVARIANT.contains(&word) {
        return word.to_string();
    }
    if let Some((singular, _)) = IRREGULAR.iter().find(|(_, p)| *p == word) {
        return (*singular).to_string();
    }
    if IRREGULAR.iter().any(|(s, _)| *s == word) {
        return word.to_string();
    }
    if let Some((singular, _)) = F_TO_VES.iter().find(|(_, p)| *p == word) {
        return (*singular).to_string();
    }
    if let Some(stem) = word.strip_suffix("ies") {
        if stem.chars().last().is_some_and(|c| !is_vowel(c)) {
            return format!("{stem}y");
        }
    }
    if let Some(stem) = word.strip_suffix("es") {
        if stem.ends_with('o') {
            return if O_TO_OES.contains(&stem) {
                stem.to_string()
            } else {
                format!("{stem}e")
            };
        }
        if ["ss", "sh", "ch", "x", "zz", "us"]
            .iter()
            .any(|end| stem.ends_with(end))
        {
            return stem.to_string();
        }
    }
    if let Some(stem) = word.strip_suffix('s').filter(|stem| VOWEL_PLUS_S.contains(stem)) {
        return stem.to_string();
    }
    if word.ends_with("ss") || word.ends_with("us") || word.ends_with("is") {
        return word.to_string();
    }
    match word.strip_suffix('s') {
        Some(stem) if !stem.is_empty() => stem.to_string(),
        _ => word.to_string(),
    }
}

/// True when the term has a distinct plural form.
pub fn is_countable(singular: &str) -> bool {
    pluralize(singular) != singular
}
