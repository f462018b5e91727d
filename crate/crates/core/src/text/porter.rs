//! Porter suffix-stripping stemmer.
//!
//! Follows the widely deployed revision of the 1980 algorithm (NLTK's
//! default mode): a short table of irregular forms, `y -> i` only after a
//! consonant, `bli -> ble`, `logi -> log`, `fulli -> ful`, and two-letter
//! `vc` stems counting as `*o`. With this revision "day" stays "day".
//!
//! Operates on `char`s so non-ASCII tokens pass through without panicking;
//! anything other than `a e i o u` (or a vowel-position `y`) is a consonant.

type Condition = fn(&Word, usize) -> bool;

#[derive(Clone)]
struct Word {
    b: Vec<char>,
}

const IRREGULAR: &[(&str, &str)] = &[
    ("sky", "sky"),
    ("skies", "sky"),
    ("dying", "die"),
    ("lying", "lie"),
    ("tying", "tie"),
    ("news", "news"),
    ("innings", "inning"),
    ("inning", "inning"),
    ("outings", "outing"),
    ("outing", "outing"),
    ("cannings", "canning"),
    ("canning", "canning"),
    ("howe", "howe"),
    ("proceed", "proceed"),
    ("exceed", "exceed"),
    ("succeed", "succeed"),
];

fn m_gt0(w: &Word, stem: usize) -> bool {
    w.measure(stem) > 0
}

fn m_gt1(w: &Word, stem: usize) -> bool {
    w.measure(stem) > 1
}

impl Word {
    fn consonant_flags(&self, len: usize) -> Vec<bool> {
        let mut flags: Vec<bool> = Vec::with_capacity(len);
        for i in 0..len {
            let c = match self.b[i] {
                'a' | 'e' | 'i' | 'o' | 'u' => false,
                'y' => i == 0 || !flags[i - 1],
                _ => true,
            };
            flags.push(c);
        }
        flags
    }

    fn is_consonant(&self, i: usize) -> bool {
        self.consonant_flags(i + 1)[i]
    }

    /// Number of VC sequences in `b[..len]`.
    fn measure(&self, len: usize) -> usize {
        self.consonant_flags(len).windows(2).filter(|w| !w[0] && w[1]).count()
    }

    fn has_vowel(&self, len: usize) -> bool {
        self.consonant_flags(len).iter().any(|c| !c)
    }

    fn ends_double_consonant(&self, len: usize) -> bool {
        len >= 2 && self.b[len - 1] == self.b[len - 2] && self.is_consonant(len - 1)
    }

    /// `*o`: ends consonant-vowel-consonant, last consonant not w, x, or y.
    /// A two-letter vowel-consonant stem also qualifies.
    fn ends_cvc(&self, len: usize) -> bool {
        if len >= 3 {
            let f = self.consonant_flags(len);
            f[len - 3] && !f[len - 2] && f[len - 1] && !matches!(self.b[len - 1], 'w' | 'x' | 'y')
        } else if len == 2 {
            let f = self.consonant_flags(2);
            !f[0] && f[1]
        } else {
            false
        }
    }

    fn ends_with(&self, suffix: &str) -> bool {
        let n = suffix.chars().count();
        n <= self.b.len() && self.b[self.b.len() - n..].iter().copied().eq(suffix.chars())
    }

    fn stem_len(&self, suffix: &str) -> usize {
        self.b.len() - suffix.chars().count()
    }

    fn replace_suffix(&mut self, suffix: &str, with: &str) {
        let keep = self.stem_len(suffix);
        self.b.truncate(keep);
        self.b.extend(with.chars());
    }

    /// The first rule whose suffix matches decides; it fires only if its
    /// condition holds on the remaining stem.
    fn apply_rules(&mut self, rules: &[(&str, &str, Condition)]) {
        for (suffix, with, cond) in rules {
            if self.ends_with(suffix) {
                if cond(self, self.stem_len(suffix)) {
                    self.replace_suffix(suffix, with);
                }
                return;
            }
        }
    }

    fn step1a(&mut self) {
        if self.b.len() == 4 && self.ends_with("ies") {
            self.replace_suffix("ies", "ie");
        } else if self.ends_with("sses") {
            self.replace_suffix("sses", "ss");
        } else if self.ends_with("ies") {
            self.replace_suffix("ies", "i");
        } else if self.ends_with("ss") {
        } else if self.ends_with("s") {
            self.replace_suffix("s", "");
        }
    }

    fn step1b(&mut self) {
        if self.ends_with("ied") {
            let with = if self.b.len() == 4 { "ie" } else { "i" };
            self.replace_suffix("ied", with);
            return;
        }
        if self.ends_with("eed") {
            if self.measure(self.stem_len("eed")) > 0 {
                self.replace_suffix("eed", "ee");
            }
            return;
        }
        let removed =
            ["ed", "ing"].into_iter().find(|suffix| self.ends_with(suffix) && self.has_vowel(self.stem_len(suffix)));
        let Some(suffix) = removed else { return };
        self.replace_suffix(suffix, "");
        let len = self.b.len();
        if self.ends_with("at") {
            self.replace_suffix("at", "ate");
        } else if self.ends_with("bl") {
            self.replace_suffix("bl", "ble");
        } else if self.ends_with("iz") {
            self.replace_suffix("iz", "ize");
        } else if self.ends_double_consonant(len) {
            if !matches!(self.b[len - 1], 'l' | 's' | 'z') {
                self.b.pop();
            }
        } else if self.measure(len) == 1 && self.ends_cvc(len) {
            self.b.push('e');
        }
    }

    fn step1c(&mut self) {
        let len = self.b.len();
        if self.ends_with("y") && len > 2 && self.is_consonant(len - 2) {
            self.replace_suffix("y", "i");
        }
    }

    fn step2(&mut self) {
        if self.ends_with("alli") && self.measure(self.stem_len("alli")) > 0 {
            self.replace_suffix("alli", "al");
            return self.step2();
        }
        fn logi_cond(w: &Word, stem: usize) -> bool {
            w.measure(stem + 1) > 0
        }
        self.apply_rules(&[
            ("ational", "ate", m_gt0),
            ("tional", "tion", m_gt0),
            ("enci", "ence", m_gt0),
            ("anci", "ance", m_gt0),
            ("izer", "ize", m_gt0),
            ("bli", "ble", m_gt0),
            ("alli", "al", m_gt0),
            ("entli", "ent", m_gt0),
            ("eli", "e", m_gt0),
            ("ousli", "ous", m_gt0),
            ("ization", "ize", m_gt0),
            ("ation", "ate", m_gt0),
            ("ator", "ate", m_gt0),
            ("alism", "al", m_gt0),
            ("iveness", "ive", m_gt0),
            ("fulness", "ful", m_gt0),
            ("ousness", "ous", m_gt0),
            ("aliti", "al", m_gt0),
            ("iviti", "ive", m_gt0),
            ("biliti", "ble", m_gt0),
            ("fulli", "ful", m_gt0),
            ("logi", "log", logi_cond),
        ]);
    }

    fn step3(&mut self) {
        self.apply_rules(&[
            ("icate", "ic", m_gt0),
            ("ative", "", m_gt0),
            ("alize", "al", m_gt0),
            ("iciti", "ic", m_gt0),
            ("ical", "ic", m_gt0),
            ("ful", "", m_gt0),
            ("ness", "", m_gt0),
        ]);
    }

    fn step4(&mut self) {
        fn ion_cond(w: &Word, stem: usize) -> bool {
            w.measure(stem) > 1 && stem > 0 && matches!(w.b[stem - 1], 's' | 't')
        }
        self.apply_rules(&[
            ("al", "", m_gt1),
            ("ance", "", m_gt1),
            ("ence", "", m_gt1),
            ("er", "", m_gt1),
            ("ic", "", m_gt1),
            ("able", "", m_gt1),
            ("ible", "", m_gt1),
            ("ant", "", m_gt1),
            ("ement", "", m_gt1),
            ("ment", "", m_gt1),
            ("ent", "", m_gt1),
            ("ion", "", ion_cond),
            ("ou", "", m_gt1),
            ("ism", "", m_gt1),
            ("ate", "", m_gt1),
            ("iti", "", m_gt1),
            ("ous", "", m_gt1),
            ("ive", "", m_gt1),
            ("ize", "", m_gt1),
        ]);
    }

    fn step5(&mut self) {
        if self.ends_with("e") {
            let stem = self.b.len() - 1;
            let m = self.measure(stem);
            if m > 1 || (m == 1 && !self.ends_cvc(stem)) {
                self.b.pop();
            }
        }
        if self.ends_with("ll") && self.measure(self.b.len() - 1) > 1 {
            self.b.pop();
        }
    }
}

/// Stems a lowercase token. Tokens of one or two characters are returned as is.
pub fn porter_stem(token: &str) -> String {
    if let Some((_, s)) = IRREGULAR.iter().find(|(w, _)| *w == token) {
        return s.to_string();
    }
    let b: Vec<char> = token.chars().collect();
    if b.len() <= 2 {
        return token.to_string();
    }
    let mut w = Word { b };
    w.step1a();
    w.step1b();
    w.step1c();
    w.step2();
    w.step3();
    w.step4();
    w.step5();
    w.b.into_iter().collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn covid_vocabulary() {
        assert_eq!(porter_stem("coronavirus"), "coronaviru");
        assert_eq!(porter_stem("quarantine"), "quarantin");
        assert_eq!(porter_stem("virus"), "viru");
    }

    #[test]
    fn classic_examples() {
        for (w, s) in [
            ("caresses", "caress"),
            ("ponies", "poni"),
            ("feed", "feed"),
            ("agreed", "agre"),
            ("hopping", "hop"),
            ("filing", "file"),
            ("happy", "happi"),
            ("day", "day"),
            ("enjoy", "enjoy"),
            ("dying", "die"),
            ("generalization", "gener"),
            ("adjustment", "adjust"),
            ("controlling", "control"),
            ("we're", "we'r"),
            ("y’all", "y’all"),
        ] {
            assert_eq!(porter_stem(w), s, "{w}");
        }
    }

    #[test]
    fn short_and_odd_tokens_pass_through() {
        assert_eq!(porter_stem("us"), "us");
        assert_eq!(porter_stem("i"), "i");
        assert_eq!(porter_stem(""), "");
        assert_eq!(porter_stem("2020"), "2020");
        assert_eq!(porter_stem("covid-19"), "covid-19");
    }
}
