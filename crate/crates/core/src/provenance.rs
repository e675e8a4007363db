use serde::Serialize;

/// How a torsion value was obtained, ordered from strongest to weakest.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Provenance {
    ClosedForm,
    ExactAbelian,
    Asserted,
    Approximated,
}

impl Provenance {
    /// The weaker of two tags.
    pub fn join(self, other: Provenance) -> Provenance {
        self.max(other)
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Provenance::ClosedForm => "closed-form",
            Provenance::ExactAbelian => "exact-abelian",
            Provenance::Asserted => "asserted",
            Provenance::Approximated => "approximated",
        }
    }
}

impl std::fmt::Display for Provenance {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for Provenance {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "closed-form" => Ok(Provenance::ClosedForm),
            "exact-abelian" => Ok(Provenance::ExactAbelian),
            "asserted" => Ok(Provenance::Asserted),
            "approximated" => Ok(Provenance::Approximated),
            _ => Err(format!("unknown provenance `{s}`")),
        }
    }
}
