//! Thai Character Cluster segmentation driven by a rule table.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const BUNDLED_RULES: &str = include_str!("../../data/tcc_rules.txt");
const MAX_CLASSES: usize = 63;
const WS_BIT: u64 = 1 << 63;

/// An inseparable run of characters; `start..end` are char offsets.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CharacterCluster {
    pub surface: String,
    pub start: usize,
    pub end: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Action {
    Bind,
    Split,
}

#[derive(Debug, Clone, Copy)]
struct Rule {
    action: Action,
    left: u64,
    right: u64,
}

/// Parsed rule table: character classes plus ordered pair rules.
#[derive(Debug, Clone)]
pub struct TccRules {
    classes: Vec<(String, Vec<(char, char)>)>,
    rules: Vec<Rule>,
    /// Class masks for U+0000..U+0E80, the range nearly all input falls in.
    table: Vec<u64>,
}

const TABLE_LEN: usize = 0x0E80;

impl Default for TccRules {
    fn default() -> Self {
        Self::parse(BUNDLED_RULES).expect("bundled TCC rules parse")
    }
}

fn parse_code_point(s: &str) -> Option<char> {
    u32::from_str_radix(s, 16).ok().and_then(char::from_u32)
}

impl TccRules {
    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| Error::Read {
            path: path.to_path_buf(),
            source,
        })?;
        Self::parse(&text).map_err(|(line, message)| Error::Parse {
            path: path.to_path_buf(),
            line,
            message,
        })
    }

    /// Parses the rule format; errors carry a 1-based line number.
    pub fn parse(text: &str) -> std::result::Result<Self, (usize, String)> {
        let mut classes: Vec<(String, Vec<(char, char)>)> = Vec::new();
        let mut rules = Vec::new();
        for (n, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let err = |m: String| (n + 1, m);
            let mut fields = line.split_whitespace();
            let keyword = fields.next().expect("non-empty line");
            match keyword {
                "class" => {
                    let name = fields.next().ok_or_else(|| err("class without a name".into()))?;
                    if name == "WS" || classes.iter().any(|(c, _)| c == name) {
                        return Err(err(format!("class `{name}` defined twice")));
                    }
                    if classes.len() == MAX_CLASSES {
                        return Err(err("too many classes".into()));
                    }
                    let mut ranges = Vec::new();
                    for range in fields {
                        let (lo, hi) = range.split_once('-').unwrap_or((range, range));
                        match (parse_code_point(lo), parse_code_point(hi)) {
                            (Some(lo), Some(hi)) if lo <= hi => ranges.push((lo, hi)),
                            _ => return Err(err(format!("bad range `{range}`"))),
                        }
                    }
                    classes.push((name.to_string(), ranges));
                }
                "bind" | "split" => {
                    let side = |s: Option<&str>| -> std::result::Result<u64, (usize, String)> {
                        let s = s.ok_or_else(|| err("rule needs LEFT and RIGHT".into()))?;
                        if s == "*" {
                            return Ok(u64::MAX);
                        }
                        s.split('|').try_fold(0u64, |mask, name| {
                            if name == "WS" {
                                return Ok(mask | WS_BIT);
                            }
                            classes
                                .iter()
                                .position(|(c, _)| c == name)
                                .map(|i| mask | (1 << i))
                                .ok_or_else(|| err(format!("unknown class `{name}`")))
                        })
                    };
                    let left = side(fields.next())?;
                    let right = side(fields.next())?;
                    if fields.next().is_some() {
                        return Err(err("trailing fields after rule".into()));
                    }
                    let action = if keyword == "bind" { Action::Bind } else { Action::Split };
                    rules.push(Rule { action, left, right });
                }
                other => return Err(err(format!("unknown directive `{other}`"))),
            }
        }
        let mut rules_table = TccRules { classes, rules, table: Vec::new() };
        rules_table.table = (0..TABLE_LEN as u32)
            .map(|cp| char::from_u32(cp).map_or(0, |c| rules_table.compute_mask(c)))
            .collect();
        Ok(rules_table)
    }

    fn compute_mask(&self, c: char) -> u64 {
        let mut mask = if c.is_whitespace() { WS_BIT } else { 0 };
        for (i, (_, ranges)) in self.classes.iter().enumerate() {
            if ranges.iter().any(|&(lo, hi)| lo <= c && c <= hi) {
                mask |= 1 << i;
            }
        }
        mask
    }

    fn mask(&self, c: char) -> u64 {
        self.table
            .get(c as usize)
            .copied()
            .unwrap_or_else(|| self.compute_mask(c))
    }

    /// Whether adjacent characters `a` and `b` belong to one cluster.
    pub fn binds(&self, a: char, b: char) -> bool {
        let (ma, mb) = (self.mask(a), self.mask(b));
        self.rules
            .iter()
            .find(|r| r.left & ma != 0 && r.right & mb != 0)
            .is_some_and(|r| r.action == Action::Bind)
    }

    /// Cluster boundaries of `chars`: `0`, each internal boundary, `len`.
    /// Empty input yields `[0]`.
    pub fn boundaries(&self, chars: &[char]) -> Vec<usize> {
        let mut out = Vec::with_capacity(chars.len() / 2 + 2);
        out.push(0);
        let mut prev_mask = chars.first().map_or(0, |&c| self.mask(c));
        for (i, &c) in chars.iter().enumerate().skip(1) {
            let mask = self.mask(c);
            let bind = self
                .rules
                .iter()
                .find(|r| r.left & prev_mask != 0 && r.right & mask != 0)
                .is_some_and(|r| r.action == Action::Bind);
            if !bind {
                out.push(i);
            }
            prev_mask = mask;
        }
        if !chars.is_empty() {
            out.push(chars.len());
        }
        out
    }

    pub fn clusters(&self, text: &str) -> Vec<CharacterCluster> {
        let chars: Vec<char> = text.chars().collect();
        self.boundaries(&chars)
            .windows(2)
            .map(|w| CharacterCluster {
                surface: chars[w[0]..w[1]].iter().collect(),
                start: w[0],
                end: w[1],
            })
            .collect()
    }
}

/// Splits `text` into clusters with the bundled rules.
pub fn cluster_tcc(text: &str) -> Vec<CharacterCluster> {
    TccRules::default().clusters(text)
}
