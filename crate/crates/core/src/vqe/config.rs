//! Run configuration files.
//!
//! ```text
//! [hamiltonian]
//! integrals = beh2_cas23.integrals
//! mapping = parity
//! taper = true
//!
//! [ansatz]
//! kind = efficient_su2
//! reps = 1
//!
//! [measurement]
//! shots_per_group = 4000
//!
//! [campaign]
//! n_repeats = 30
//! seed = 7
//! ```
//!
//! Relative paths resolve against the directory of the config file.

use std::path::{Path, PathBuf};
use std::str::FromStr;

use ini::Ini;

use crate::ansatz::UccsdMapping;
use crate::error::{Error, Result};
use crate::fermion::{Encoding, ParticleSector};
use crate::mitigation::{DEFAULT_CALIBRATION_CIRCUITS, DEFAULT_CALIBRATION_SHOTS};
use crate::sim::{DEFAULT_DEPOL_1Q, DEFAULT_DEPOL_2Q, DEFAULT_EPS0, DEFAULT_EPS1};
use crate::spsa::SpsaConfig;

#[derive(Debug, Clone, PartialEq)]
pub enum HamiltonianSource {
    Integrals {
        path: PathBuf,
        encoding: Encoding,
        taper: bool,
        /// Overrides the file's `nelec` line.
        sector: Option<ParticleSector>,
    },
    Qubit {
        path: PathBuf,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AnsatzChoice {
    EfficientSu2 { reps: usize },
    /// The mapping follows the Hamiltonian source when not given.
    Uccsd { mapping: Option<UccsdMapping> },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseSpec {
    pub eps0: f64,
    pub eps1: f64,
    pub depol_1q: f64,
    pub depol_2q: f64,
}

impl Default for NoiseSpec {
    fn default() -> Self {
        NoiseSpec {
            eps0: DEFAULT_EPS0,
            eps1: DEFAULT_EPS1,
            depol_1q: DEFAULT_DEPOL_1Q,
            depol_2q: DEFAULT_DEPOL_2Q,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MitigationSpec {
    None,
    Trex {
        circuits: usize,
        shots: u64,
        /// Recalibrate every this many iterations.
        calibrate_every: usize,
    },
    Rem {
        shots_per_state: u64,
    },
}

impl MitigationSpec {
    pub fn trex_default() -> Self {
        MitigationSpec::Trex {
            circuits: DEFAULT_CALIBRATION_CIRCUITS,
            shots: DEFAULT_CALIBRATION_SHOTS,
            calibrate_every: 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub hamiltonian: HamiltonianSource,
    pub ansatz: AnsatzChoice,
    pub spsa: SpsaConfig,
    pub shots_per_group: u64,
    pub twirls_per_group: u64,
    pub noise: Option<NoiseSpec>,
    pub mitigation: MitigationSpec,
    pub n_repeats: usize,
    pub seed: u64,
}

impl RunConfig {
    /// Defaults for everything except the Hamiltonian.
    pub fn new(hamiltonian: HamiltonianSource) -> Self {
        RunConfig {
            hamiltonian,
            ansatz: AnsatzChoice::EfficientSu2 { reps: 1 },
            spsa: SpsaConfig::default(),
            shots_per_group: 4000,
            twirls_per_group: 0,
            noise: None,
            mitigation: MitigationSpec::None,
            n_repeats: 30,
            seed: 0,
        }
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        RunConfig::parse(&text, path)
    }

    pub fn parse(text: &str, path: &Path) -> Result<Self> {
        let ini = Ini::load_from_str(text).map_err(|e| Error::parse(path, e.line, e.msg.to_string()))?;
        let base = path.parent().unwrap_or(Path::new("")).to_path_buf();
        let doc = Doc { ini: &ini, text, path };
        doc.check_known()?;

        let hamiltonian = match (doc.get("hamiltonian", "integrals"), doc.get("hamiltonian", "qubit")) {
            (Some(_), Some(_)) => {
                return Err(doc.err("hamiltonian", "qubit", "give either integrals or qubit, not both"))
            }
            (Some(p), None) => HamiltonianSource::Integrals {
                path: base.join(p),
                encoding: doc.value("hamiltonian", "mapping")?.unwrap_or(Encoding::Parity),
                taper: doc.flag("hamiltonian", "taper")?.unwrap_or(false),
                sector: doc.sector("hamiltonian", "sector")?,
            },
            (None, Some(p)) => HamiltonianSource::Qubit { path: base.join(p) },
            (None, None) => {
                return Err(Error::parse(path, 1, "missing [hamiltonian] integrals or qubit entry"));
            }
        };
        let mut cfg = RunConfig::new(hamiltonian);

        let kind = doc.get("ansatz", "kind").unwrap_or("efficient_su2");
        cfg.ansatz = match kind {
            "efficient_su2" => AnsatzChoice::EfficientSu2 {
                reps: doc.value("ansatz", "reps")?.unwrap_or(1),
            },
            "uccsd" => AnsatzChoice::Uccsd {
                mapping: match doc.get("ansatz", "mapping") {
                    None => None,
                    Some("jw") => Some(UccsdMapping::JordanWigner),
                    Some("parity_tapered") => Some(UccsdMapping::ParityTapered),
                    Some(other) => {
                        return Err(doc.err("ansatz", "mapping", &format!("unknown UCCSD mapping '{other}'")))
                    }
                },
            },
            other => return Err(doc.err("ansatz", "kind", &format!("unknown ansatz '{other}'"))),
        };

        let s = &mut cfg.spsa;
        s.alpha = doc.value("spsa", "alpha")?.unwrap_or(s.alpha);
        s.gamma = doc.value("spsa", "gamma")?.unwrap_or(s.gamma);
        s.stability = doc.value("spsa", "stability")?.unwrap_or(s.stability);
        s.c = doc.value("spsa", "c")?.unwrap_or(s.c);
        s.max_iterations = doc.value("spsa", "max_iterations")?.unwrap_or(s.max_iterations);
        s.calibration_calls = doc.value("spsa", "calibration_calls")?.unwrap_or(s.calibration_calls);
        s.target_first_step = doc.value("spsa", "target_first_step")?.unwrap_or(s.target_first_step);
        s.learning_rate = doc.value("spsa", "learning_rate")?;
        s.validate().map_err(|e| Error::parse(path, doc.section_line("spsa"), e.to_string()))?;

        cfg.shots_per_group = doc.value("measurement", "shots_per_group")?.unwrap_or(cfg.shots_per_group);
        cfg.twirls_per_group = doc.value("measurement", "twirls_per_group")?.unwrap_or(0);

        cfg.noise = match doc.get("noise", "model").unwrap_or("none") {
            "none" => None,
            "surrogate" => {
                let d = NoiseSpec::default();
                Some(NoiseSpec {
                    eps0: doc.value("noise", "eps0")?.unwrap_or(d.eps0),
                    eps1: doc.value("noise", "eps1")?.unwrap_or(d.eps1),
                    depol_1q: doc.value("noise", "depol_1q")?.unwrap_or(d.depol_1q),
                    depol_2q: doc.value("noise", "depol_2q")?.unwrap_or(d.depol_2q),
                })
            }
            other => return Err(doc.err("noise", "model", &format!("unknown noise model '{other}'"))),
        };

        cfg.mitigation = match doc.get("mitigation", "kind").unwrap_or("none") {
            "none" => MitigationSpec::None,
            "trex" => MitigationSpec::Trex {
                circuits: doc.value("mitigation", "trex_circuits")?.unwrap_or(DEFAULT_CALIBRATION_CIRCUITS),
                shots: doc.value("mitigation", "trex_shots")?.unwrap_or(DEFAULT_CALIBRATION_SHOTS),
                calibrate_every: doc.value("mitigation", "calibrate_every")?.unwrap_or(1),
            },
            "rem" => MitigationSpec::Rem {
                shots_per_state: doc.value("mitigation", "rem_shots_per_state")?.unwrap_or(8192),
            },
            other => return Err(doc.err("mitigation", "kind", &format!("unknown mitigation '{other}'"))),
        };
        if let MitigationSpec::Trex { calibrate_every: 0, .. } = cfg.mitigation {
            return Err(doc.err("mitigation", "calibrate_every", "must be at least 1"));
        }

        cfg.n_repeats = doc.value("campaign", "n_repeats")?.unwrap_or(cfg.n_repeats);
        cfg.seed = doc.value("campaign", "seed")?.unwrap_or(0);
        Ok(cfg)
    }
}

const KNOWN: &[(&str, &[&str])] = &[
    ("hamiltonian", &["integrals", "qubit", "mapping", "taper", "sector"]),
    ("ansatz", &["kind", "reps", "mapping"]),
    (
        "spsa",
        &[
            "alpha",
            "gamma",
            "stability",
            "c",
            "max_iterations",
            "calibration_calls",
            "target_first_step",
            "learning_rate",
        ],
    ),
    ("measurement", &["shots_per_group", "twirls_per_group"]),
    ("noise", &["model", "eps0", "eps1", "depol_1q", "depol_2q"]),
    (
        "mitigation",
        &["kind", "trex_circuits", "trex_shots", "calibrate_every", "rem_shots_per_state"],
    ),
    ("campaign", &["n_repeats", "seed"]),
];

struct Doc<'a> {
    ini: &'a Ini,
    text: &'a str,
    path: &'a Path,
}

impl Doc<'_> {
    fn get(&self, section: &str, key: &str) -> Option<&str> {
        self.ini.section(Some(section)).and_then(|p| p.get(key)).map(str::trim)
    }

    /// Line of `key` inside `[section]`, or of the header, or 1.
    fn line_of(&self, section: &str, key: Option<&str>) -> usize {
        let mut current = None;
        let mut header = 1;
        for (i, raw) in self.text.lines().enumerate() {
            let line = raw.trim();
            if let Some(name) = line.strip_prefix('[').and_then(|l| l.strip_suffix(']')) {
                current = Some(name.trim().to_string());
                if name.trim() == section {
                    header = i + 1;
                }
                continue;
            }
            if current.as_deref() != Some(section) {
                continue;
            }
            if let (Some(k), Some((lhs, _))) = (key, line.split_once('=')) {
                if lhs.trim() == k {
                    return i + 1;
                }
            }
        }
        header
    }

    fn section_line(&self, section: &str) -> usize {
        self.line_of(section, None)
    }

    fn err(&self, section: &str, key: &str, msg: &str) -> Error {
        Error::parse(self.path, self.line_of(section, Some(key)), format!("[{section}] {key}: {msg}"))
    }

    fn value<T: FromStr>(&self, section: &str, key: &str) -> Result<Option<T>> {
        self.get(section, key)
            .map(|v| v.parse::<T>().map_err(|_| self.err(section, key, &format!("cannot parse '{v}'"))))
            .transpose()
    }

    fn flag(&self, section: &str, key: &str) -> Result<Option<bool>> {
        match self.get(section, key) {
            None => Ok(None),
            Some("true" | "yes" | "1") => Ok(Some(true)),
            Some("false" | "no" | "0") => Ok(Some(false)),
            Some(v) => Err(self.err(section, key, &format!("expected true or false, found '{v}'"))),
        }
    }

    fn sector(&self, section: &str, key: &str) -> Result<Option<ParticleSector>> {
        let Some(v) = self.get(section, key) else { return Ok(None) };
        let parts: Vec<usize> = v
            .split_whitespace()
            .map(str::parse)
            .collect::<std::result::Result<_, _>>()
            .map_err(|_| self.err(section, key, &format!("expected two electron counts, found '{v}'")))?;
        match parts.as_slice() {
            [a, b] => Ok(Some(ParticleSector::new(*a, *b))),
            _ => Err(self.err(section, key, &format!("expected two electron counts, found '{v}'"))),
        }
    }

    fn check_known(&self) -> Result<()> {
        for (name, props) in self.ini.iter() {
            let Some(name) = name else {
                if let Some((k, _)) = props.iter().next() {
                    return Err(Error::parse(self.path, 1, format!("key '{k}' appears before any section")));
                }
                continue;
            };
            let Some((_, keys)) = KNOWN.iter().find(|(s, _)| *s == name) else {
                return Err(Error::parse(
                    self.path,
                    self.section_line(name),
                    format!("unknown section [{name}]"),
                ));
            };
            for (k, _) in props.iter() {
                if !keys.contains(&k) {
                    return Err(self.err(name, k, "unknown key"));
                }
            }
        }
        Ok(())
    }
}
