//! High-level subgoals, the vocabulary plans and recovery replies are written in.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::vocab;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Verb {
    Find,
    #[serde(rename = "Go_to")]
    GoTo,
    #[serde(rename = "Pick_up")]
    PickUp,
    Place,
    Open,
    Close,
    #[serde(rename = "Toggle_on")]
    ToggleOn,
    #[serde(rename = "Toggle_off")]
    ToggleOff,
    Slice,
    Pour,
    #[serde(rename = "Fill_with_water")]
    FillWithWater,
    Clean,
    Empty,
    #[serde(rename = "Put_away")]
    PutAway,
}

impl Verb {
    pub const ALL: [Verb; 14] = [
        Verb::Find,
        Verb::GoTo,
        Verb::PickUp,
        Verb::Place,
        Verb::Open,
        Verb::Close,
        Verb::ToggleOn,
        Verb::ToggleOff,
        Verb::Slice,
        Verb::Pour,
        Verb::FillWithWater,
        Verb::Clean,
        Verb::Empty,
        Verb::PutAway,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Verb::Find => "Find",
            Verb::GoTo => "Go_to",
            Verb::PickUp => "Pick_up",
            Verb::Place => "Place",
            Verb::Open => "Open",
            Verb::Close => "Close",
            Verb::ToggleOn => "Toggle_on",
            Verb::ToggleOff => "Toggle_off",
            Verb::Slice => "Slice",
            Verb::Pour => "Pour",
            Verb::FillWithWater => "Fill_with_water",
            Verb::Clean => "Clean",
            Verb::Empty => "Empty",
            Verb::PutAway => "Put_away",
        }
    }

    pub fn arity(self) -> usize {
        match self {
            Verb::Place | Verb::Pour => 2,
            _ => 1,
        }
    }

    /// Case-insensitive, tolerant of missing underscores (`PickUp`, `pick up`).
    pub fn parse(s: &str) -> Option<Verb> {
        let key: String = s
            .chars()
            .filter(|c| c.is_ascii_alphanumeric())
            .map(|c| c.to_ascii_lowercase())
            .collect();
        Verb::ALL.into_iter().find(|v| {
            let name: String = v.as_str().chars().filter(|c| *c != '_').collect();
            name.to_ascii_lowercase() == key
        })
    }
}

impl fmt::Display for Verb {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SubgoalError {
    #[error("`{0}` is not of the form Verb(Arg[,Arg])")]
    Syntax(String),
    #[error("unknown verb `{0}`")]
    UnknownVerb(String),
    #[error("{verb} takes {expected} argument(s), got {got}")]
    Arity { verb: Verb, expected: usize, got: usize },
    #[error("`{0}` does not name an object category")]
    UnknownCategory(String),
}

/// One plan step. Arguments are instance ids (`Mug_1`) or bare categories.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Subgoal {
    pub verb: Verb,
    pub args: Vec<String>,
}

impl Subgoal {
    pub fn new(verb: Verb, args: &[&str]) -> Result<Subgoal, SubgoalError> {
        let sg = Subgoal {
            verb,
            args: args.iter().map(|a| a.to_string()).collect(),
        };
        sg.check_arity()?;
        Ok(sg)
    }

    pub fn one(verb: Verb, arg: impl Into<String>) -> Subgoal {
        assert_eq!(verb.arity(), 1, "{verb} takes two arguments");
        Subgoal {
            verb,
            args: vec![arg.into()],
        }
    }

    pub fn two(verb: Verb, obj: impl Into<String>, rec: impl Into<String>) -> Subgoal {
        assert_eq!(verb.arity(), 2, "{verb} takes one argument");
        Subgoal {
            verb,
            args: vec![obj.into(), rec.into()],
        }
    }

    fn check_arity(&self) -> Result<(), SubgoalError> {
        if self.args.len() != self.verb.arity() {
            return Err(SubgoalError::Arity {
                verb: self.verb,
                expected: self.verb.arity(),
                got: self.args.len(),
            });
        }
        Ok(())
    }

    pub fn object(&self) -> &str {
        &self.args[0]
    }

    pub fn receptacle(&self) -> Option<&str> {
        self.args.get(1).map(String::as_str)
    }

    /// Categories of all arguments.
    pub fn categories(&self) -> impl Iterator<Item = &str> {
        self.args.iter().map(|a| vocab::category_of(a))
    }

    /// Errors on the first argument whose category is not in the vocabulary.
    pub fn validate_categories(&self) -> Result<(), SubgoalError> {
        for a in &self.args {
            if !vocab::is_category(vocab::category_of(a)) {
                return Err(SubgoalError::UnknownCategory(a.clone()));
            }
        }
        Ok(())
    }

    /// Rewrites each argument's category with `f`, keeping instance suffixes.
    pub fn map_categories(&self, mut f: impl FnMut(&str) -> String) -> Subgoal {
        let args = self
            .args
            .iter()
            .map(|a| {
                let cat = vocab::category_of(a);
                let suffix = &a[cat.len()..];
                format!("{}{}", f(cat), suffix)
            })
            .collect();
        Subgoal {
            verb: self.verb,
            args,
        }
    }
}

impl fmt::Display for Subgoal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}({})", self.verb, self.args.join(","))
    }
}

impl FromStr for Subgoal {
    type Err = SubgoalError;
    fn from_str(s: &str) -> Result<Subgoal, SubgoalError> {
        let t = s.trim().trim_end_matches([',', ';', '.']).trim();
        let syntax = || SubgoalError::Syntax(s.to_string());
        let open = t.find('(').ok_or_else(syntax)?;
        let inner = t[open + 1..].strip_suffix(')').ok_or_else(syntax)?;
        let head = t[..open].trim();
        let verb = Verb::parse(head).ok_or_else(|| SubgoalError::UnknownVerb(head.to_string()))?;
        let args: Vec<String> = inner
            .split(',')
            .map(|a| a.trim().trim_matches(['"', '\'']).to_string())
            .filter(|a| !a.is_empty())
            .collect();
        if args.iter().any(|a| !a.chars().all(|c| c.is_ascii_alphanumeric() || c == '_')) {
            return Err(syntax());
        }
        let sg = Subgoal { verb, args };
        sg.check_arity()?;
        Ok(sg)
    }
}

impl Serialize for Subgoal {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Subgoal {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StepStatus {
    Pending,
    Success,
    Failed,
    Skipped,
}

impl StepStatus {
    pub fn as_str(self) -> &'static str {
        match self {
            StepStatus::Pending => "pending",
            StepStatus::Success => "success",
            StepStatus::Failed => "failed",
            StepStatus::Skipped => "skipped",
        }
    }
}

/// A plan step together with its execution status.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PlanStep {
    pub subgoal: Subgoal,
    pub status: StepStatus,
}

/// One line per step: `Pick_up(Mug_1) (success)`.
pub fn render_history(steps: &[PlanStep]) -> String {
    steps
        .iter()
        .map(|s| format!("{} ({})", s.subgoal, s.status.as_str()))
        .collect::<Vec<_>>()
        .join("\n")
}
