//! String rewriting systems over group alphabets and the word-problem oracle.
//!
//! Rules are monoid rules over the letters `x` and `x^-1`; free cancellation
//! is not implicit and must be listed (or requested with `%free`).
//!
//! Rule files hold one `lhs -> rhs` rule per line with `#` comments. Two
//! directives are recognised on lines starting with `%`:
//!
//! ```text
//! %free                                  # add x x^-1 -> 1 for every letter
//! %order shortlex a a^-1 b b^-1          # letter order, smallest first
//! %order wreath b b^-1 | a a^-1          # levels, lowest first
//! ```

use std::cmp::Ordering;
use std::collections::HashMap;

use thiserror::Error;

use crate::presentation::{parse_word, tokenize, ParseError, Parser};
use crate::word::{shortlex_cmp, Alphabet, Letter, Word};

pub const DEFAULT_REWRITE_BUDGET: usize = 1_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RewriteError {
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error("rule {index} does not decrease in the reduction order: {lhs} -> {rhs}")]
    NotDecreasing { index: usize, lhs: String, rhs: String },
    #[error("invalid reduction order: {0}")]
    BadOrder(String),
    #[error("rewrite budget of {budget} steps exceeded")]
    BudgetExceeded { budget: usize },
}

/// Well-founded orders on words used to orient rules.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ReductionOrder {
    /// Length first, then lexicographic by the listed letter order.
    ShortLex(Vec<Letter>),
    /// Recursive wreath order over levels, lowest level first. Words compare
    /// by the shortlex order of their top-level letters, then segment by
    /// segment between those letters using the next level down.
    Wreath(Vec<Vec<Letter>>),
}

impl ReductionOrder {
    pub fn shortlex(alphabet: &Alphabet) -> ReductionOrder {
        ReductionOrder::ShortLex(alphabet.letters())
    }

    fn validate(&self, alphabet: &Alphabet) -> Result<(), RewriteError> {
        let mut seen = vec![false; 2 * alphabet.rank()];
        let all: Vec<Letter> = match self {
            ReductionOrder::ShortLex(ls) => ls.clone(),
            ReductionOrder::Wreath(levels) => levels.iter().flatten().copied().collect(),
        };
        for l in all {
            if l.index() >= seen.len() || std::mem::replace(&mut seen[l.index()], true) {
                return Err(RewriteError::BadOrder(format!("letter {} listed twice or unknown", l.index())));
            }
        }
        if let Some(i) = seen.iter().position(|s| !s) {
            return Err(RewriteError::BadOrder(format!(
                "letter {} missing",
                alphabet.letter_name(Letter::from_index(i))
            )));
        }
        Ok(())
    }

    fn weights(&self, size: usize) -> (Vec<u32>, Vec<usize>) {
        let mut weight = vec![0u32; size];
        let mut level = vec![0usize; size];
        match self {
            ReductionOrder::ShortLex(ls) => {
                for (i, l) in ls.iter().enumerate() {
                    weight[l.index()] = i as u32;
                }
            }
            ReductionOrder::Wreath(levels) => {
                let mut i = 0;
                for (lv, ls) in levels.iter().enumerate() {
                    for l in ls {
                        weight[l.index()] = i;
                        level[l.index()] = lv;
                        i += 1;
                    }
                }
            }
        }
        (weight, level)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Rule {
    pub lhs: Word,
    pub rhs: Word,
}

#[derive(Clone, Debug)]
pub struct RewritingSystem {
    alphabet: Alphabet,
    order: ReductionOrder,
    rules: Vec<Rule>,
    weight: Vec<u32>,
    level: Vec<usize>,
    top_level: usize,
    lookup: HashMap<Vec<Letter>, usize>,
    lengths: Vec<usize>,
    budget: usize,
}

/// `x x^-1 -> 1` for every letter, in letter order.
pub fn free_cancellation_rules(alphabet: &Alphabet) -> Vec<Rule> {
    alphabet
        .letters()
        .into_iter()
        .map(|l| Rule { lhs: Word::from_letters(vec![l, l.inverse()]), rhs: Word::empty() })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ConfluenceReport {
    Confluent { pairs: usize },
    /// First critical pair whose two reductions disagree.
    NotConfluent { overlap: Word, left: Word, right: Word, pairs: usize },
    /// More than `pair_bound` critical pairs; `pairs` were checked and resolved.
    Unknown { pairs: usize },
}

impl RewritingSystem {
    pub fn new(alphabet: Alphabet, order: ReductionOrder, rules: Vec<Rule>) -> Result<Self, RewriteError> {
        order.validate(&alphabet)?;
        let (weight, level) = order.weights(2 * alphabet.rank());
        let top_level = level.iter().copied().max().unwrap_or(0);
        let mut rws = RewritingSystem {
            alphabet,
            order,
            rules: Vec::new(),
            weight,
            level,
            top_level,
            lookup: HashMap::new(),
            lengths: Vec::new(),
            budget: DEFAULT_REWRITE_BUDGET,
        };
        for (index, rule) in rules.iter().enumerate() {
            if rws.compare(rule.lhs.letters(), rule.rhs.letters()) != Ordering::Greater {
                return Err(RewriteError::NotDecreasing {
                    index,
                    lhs: rule.lhs.display(&rws.alphabet).to_string(),
                    rhs: rule.rhs.display(&rws.alphabet).to_string(),
                });
            }
            rws.lookup.entry(rule.lhs.letters().to_vec()).or_insert(index);
            if !rws.lengths.contains(&rule.lhs.len()) {
                rws.lengths.push(rule.lhs.len());
            }
        }
        rws.lengths.sort_unstable();
        rws.rules = rules;
        Ok(rws)
    }

    /// The free group on `alphabet`: cancellation rules only.
    pub fn free(alphabet: Alphabet) -> RewritingSystem {
        let rules = free_cancellation_rules(&alphabet);
        let order = ReductionOrder::shortlex(&alphabet);
        RewritingSystem::new(alphabet, order, rules).expect("cancellation rules decrease")
    }

    pub fn with_budget(mut self, budget: usize) -> RewritingSystem {
        self.budget = budget;
        self
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn rules(&self) -> &[Rule] {
        &self.rules
    }

    pub fn order(&self) -> &ReductionOrder {
        &self.order
    }

    /// Compares two words in the reduction order.
    pub fn compare(&self, x: &[Letter], y: &[Letter]) -> Ordering {
        match self.order {
            ReductionOrder::ShortLex(_) => self.shortlex_weighted(x, y),
            ReductionOrder::Wreath(_) => self.wreath_cmp(x, y, self.top_level),
        }
    }

    fn shortlex_weighted(&self, x: &[Letter], y: &[Letter]) -> Ordering {
        x.len().cmp(&y.len()).then_with(|| {
            let wx = x.iter().map(|l| self.weight[l.index()]);
            let wy = y.iter().map(|l| self.weight[l.index()]);
            wx.cmp(wy)
        })
    }

    fn wreath_cmp(&self, x: &[Letter], y: &[Letter], top: usize) -> Ordering {
        let is_top = |l: &&Letter| self.level[l.index()] == top;
        let px: Vec<Letter> = x.iter().filter(is_top).copied().collect();
        let py: Vec<Letter> = y.iter().filter(is_top).copied().collect();
        let c = self.shortlex_weighted(&px, &py);
        if c != Ordering::Equal || top == 0 {
            return c;
        }
        let sx = x.split(|l| self.level[l.index()] == top);
        let sy = y.split(|l| self.level[l.index()] == top);
        for (a, b) in sx.zip(sy) {
            let c = self.wreath_cmp(a, b, top - 1);
            if c != Ordering::Equal {
                return c;
            }
        }
        Ordering::Equal
    }

    /// Rewrites `w` to an irreducible word, failing once the step budget is spent.
    pub fn normalize(&self, w: &Word) -> Result<Word, RewriteError> {
        let mut pending: Vec<Letter> = w.letters().iter().rev().copied().collect();
        let mut out: Vec<Letter> = Vec::with_capacity(w.len());
        let mut steps = 0usize;
        while let Some(l) = pending.pop() {
            out.push(l);
            for &len in &self.lengths {
                if len > out.len() {
                    break;
                }
                let start = out.len() - len;
                if let Some(&r) = self.lookup.get(&out[start..]) {
                    steps += 1;
                    if steps > self.budget {
                        return Err(RewriteError::BudgetExceeded { budget: self.budget });
                    }
                    out.truncate(start);
                    pending.extend(self.rules[r].rhs.letters().iter().rev());
                    break;
                }
            }
        }
        Ok(Word::from_letters(out))
    }

    /// Normal form of the product `x y`.
    pub fn multiply(&self, x: &Word, y: &Word) -> Result<Word, RewriteError> {
        self.normalize(&x.concat(y))
    }

    /// Resolves every critical pair, stopping at the first disagreement.
    pub fn check_confluence(&self, pair_bound: usize) -> Result<ConfluenceReport, RewriteError> {
        let mut pairs = 0usize;
        for ri in &self.rules {
            let li = ri.lhs.letters();
            for rj in &self.rules {
                let lj = rj.lhs.letters();
                let mut candidates: Vec<(Word, Word, Word)> = Vec::new();
                // proper overlaps: a suffix of li equals a prefix of lj
                for k in 1..li.len().min(lj.len()) {
                    if li[li.len() - k..] == lj[..k] {
                        let tail = Word::from_letters(lj[k..].to_vec());
                        let head = Word::from_letters(li[..li.len() - k].to_vec());
                        candidates.push((ri.lhs.concat(&tail), ri.rhs.concat(&tail), head.concat(&rj.rhs)));
                    }
                }
                // inclusions: lj occurs inside li
                if !std::ptr::eq(ri, rj) && lj.len() <= li.len() {
                    for p in 0..=li.len() - lj.len() {
                        if li[p..p + lj.len()] == *lj {
                            let mut right = li[..p].to_vec();
                            right.extend_from_slice(rj.rhs.letters());
                            right.extend_from_slice(&li[p + lj.len()..]);
                            candidates.push((ri.lhs.clone(), ri.rhs.clone(), Word::from_letters(right)));
                        }
                    }
                }
                for (overlap, left, right) in candidates {
                    if pairs == pair_bound {
                        return Ok(ConfluenceReport::Unknown { pairs });
                    }
                    pairs += 1;
                    let (nl, nr) = (self.normalize(&left)?, self.normalize(&right)?);
                    if nl != nr {
                        return Ok(ConfluenceReport::NotConfluent { overlap, left: nl, right: nr, pairs });
                    }
                }
            }
        }
        Ok(ConfluenceReport::Confluent { pairs })
    }

    /// Renders the system in rule-file syntax.
    pub fn to_rules_text(&self) -> String {
        let al = &self.alphabet;
        let names = |ls: &[Letter]| ls.iter().map(|&l| al.letter_name(l)).collect::<Vec<_>>().join(" ");
        let mut s = match &self.order {
            ReductionOrder::ShortLex(ls) => format!("%order shortlex {}\n", names(ls)),
            ReductionOrder::Wreath(levels) => format!(
                "%order wreath {}\n",
                levels.iter().map(|l| names(l)).collect::<Vec<_>>().join(" | ")
            ),
        };
        for r in &self.rules {
            s.push_str(&format!("{} -> {}\n", r.lhs.display(al), r.rhs.display(al)));
        }
        s
    }
}

/// Parses a rule file over `alphabet`. Without an `%order` directive the
/// shortlex order of the declared generators is used.
pub fn parse_rules(text: &str, alphabet: &Alphabet) -> Result<RewritingSystem, RewriteError> {
    let mut order = ReductionOrder::shortlex(alphabet);
    let mut rules = Vec::new();
    for (li, line) in text.lines().enumerate() {
        let trimmed = line.trim_start();
        if let Some(directive) = trimmed.strip_prefix('%') {
            let directive = directive.split('#').next().unwrap_or("").trim();
            let (head, rest) = directive.split_once(char::is_whitespace).unwrap_or((directive, ""));
            match head {
                "free" => rules.extend(free_cancellation_rules(alphabet)),
                "order" => order = parse_order(rest, alphabet).map_err(|e| relocate(e, li + 1))?,
                _ => {
                    return Err(ParseError::Syntax {
                        line: li + 1,
                        column: 1,
                        message: format!("unknown directive `%{head}`"),
                    }
                    .into())
                }
            }
            continue;
        }
        let toks = tokenize(line).map_err(|e| relocate(e.into(), li + 1))?;
        if toks.is_empty() {
            continue;
        }
        let mut p = Parser::new(&toks);
        let rule = (|| {
            let lhs = p.word(alphabet)?;
            if lhs.is_empty() {
                return Err(p.error("rule with empty left-hand side"));
            }
            if !p.eat_arrow() {
                return Err(p.error("expected `->`"));
            }
            let rhs = p.word(alphabet)?;
            if !p.at_end() {
                return Err(p.error("unexpected input after rule"));
            }
            Ok(Rule { lhs, rhs })
        })()
        .map_err(|e| relocate(e.into(), li + 1))?;
        rules.push(rule);
    }
    RewritingSystem::new(alphabet.clone(), order, rules)
}

fn relocate(e: RewriteError, line: usize) -> RewriteError {
    match e {
        RewriteError::Parse(ParseError::Syntax { column, message, .. }) => {
            ParseError::Syntax { line, column, message }.into()
        }
        RewriteError::Parse(ParseError::UndeclaredGenerator { name, column, .. }) => {
            ParseError::UndeclaredGenerator { name, line, column }.into()
        }
        other => other,
    }
}

fn parse_order(text: &str, alphabet: &Alphabet) -> Result<ReductionOrder, RewriteError> {
    let (kind, rest) = text.trim().split_once(char::is_whitespace).unwrap_or((text.trim(), ""));
    let letters_of = |s: &str| -> Result<Vec<Letter>, RewriteError> {
        let w = parse_word(s, alphabet)?;
        if w.is_empty() {
            return Err(RewriteError::BadOrder("empty letter list".into()));
        }
        Ok(w.into_letters())
    };
    let order = match kind {
        "shortlex" if rest.trim().is_empty() => ReductionOrder::shortlex(alphabet),
        "shortlex" => ReductionOrder::ShortLex(letters_of(rest)?),
        "wreath" => ReductionOrder::Wreath(rest.split('|').map(letters_of).collect::<Result<_, _>>()?),
        other => return Err(RewriteError::BadOrder(format!("unknown order `{other}`"))),
    };
    order.validate(alphabet)?;
    Ok(order)
}

/// Shortlex comparison in the default letter order; used for canonical sorting.
pub fn canonical_cmp(x: &Word, y: &Word) -> Ordering {
    shortlex_cmp(x.letters(), y.letters())
}
