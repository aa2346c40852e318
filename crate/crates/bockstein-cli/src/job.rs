use std::sync::Arc;

use bockstein::cohomology::Cochain;
use bockstein::gmodule::GMod;
use bockstein::group_ring::{augmentation_powers, BasisStyle, GroupRing};
use bockstein::groups::{coimage, Character, FiniteGroup, GroupHom, Heisenberg};
use bockstein::modular_linalg::ModRing;
use serde::{Deserialize, Serialize};

use crate::Failure;

/// One job document.
#[derive(Clone, Debug, Default, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct JobSpec {
    pub group: GroupSpec,
    #[serde(default)]
    pub ring: RingSpec,
    #[serde(default)]
    pub module: ModuleSpec,
    /// Each character is given by its images of the group generators.
    #[serde(default)]
    pub characters: Vec<Vec<i64>>,
    /// Modulus of the characters, `p` when absent.
    pub character_modulus: Option<u64>,
    /// Generator images of `λ` for `triple-vanish`, `galois-type` lifts and `massey`.
    pub lambda: Option<Vec<i64>>,
    #[serde(default = "one")]
    pub n: usize,
    #[serde(default)]
    pub seeds: Vec<u64>,
    /// Random samples per seed where a command draws several.
    #[serde(default = "one")]
    pub samples: usize,
    #[serde(default = "default_degrees")]
    pub degrees: Vec<usize>,
    pub a: Option<usize>,
    pub b: Option<usize>,
    /// Explicit values of the free entries of a triple defining system.
    pub rho02: Option<Vec<i64>>,
    pub rho13: Option<Vec<i64>>,
    /// Also require `p_s(s′) = δ_{s,s′}` and equality of cochains without the `dc` term.
    #[serde(default)]
    pub literal: bool,
    pub output: Option<String>,
}

fn one() -> usize {
    1
}

fn default_degrees() -> Vec<usize> {
    vec![0, 1, 2]
}

#[derive(Clone, Debug, Default, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct GroupSpec {
    pub kind: GroupKind,
    /// Cyclic factors for `cyclic` and `abelian`.
    #[serde(default)]
    pub orders: Vec<u64>,
    /// Modulus of the entries for `heisenberg`.
    pub q: Option<u64>,
}

#[derive(Clone, Copy, Debug, Default, Deserialize, Serialize, PartialEq, Eq)]
#[serde(rename_all = "lowercase")]
pub enum GroupKind {
    #[default]
    Cyclic,
    Abelian,
    Heisenberg,
    Quaternion,
}

#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct RingSpec {
    pub p: u64,
    #[serde(default = "one_u32")]
    pub s: u32,
}

fn one_u32() -> u32 {
    1
}

impl Default for RingSpec {
    fn default() -> Self {
        RingSpec { p: 3, s: 1 }
    }
}

#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct ModuleSpec {
    #[serde(default)]
    pub kind: ModuleKind,
    #[serde(default = "one")]
    pub rank: usize,
    /// `Ω/I^depth` for `truncated`.
    pub depth: Option<usize>,
}

impl Default for ModuleSpec {
    fn default() -> Self {
        ModuleSpec { kind: ModuleKind::Trivial, rank: 1, depth: None }
    }
}

#[derive(Clone, Copy, Debug, Default, Deserialize, Serialize, PartialEq, Eq)]
#[serde(rename_all = "lowercase")]
pub enum ModuleKind {
    #[default]
    Trivial,
    /// `R[H]` for `H` the coimage of the characters, or `G` itself.
    Regular,
    /// `R[H]/I^depth`.
    Truncated,
}

/// A job with its group, ring and characters constructed.
pub struct Instance {
    pub spec: JobSpec,
    pub group: Arc<FiniteGroup>,
    pub heisenberg: Option<Heisenberg>,
    pub ring: ModRing,
    pub characters: Vec<Character>,
}

fn input<E: std::fmt::Display>(e: E) -> Failure {
    Failure::Input(e.to_string())
}

impl Instance {
    pub fn new(spec: JobSpec) -> Result<Self, Failure> {
        let ring = ModRing::new(spec.ring.p, spec.ring.s).map_err(input)?;
        if spec.module.rank == 0 {
            return Err(Failure::Input("module rank must be positive".into()));
        }
        let (group, heisenberg) = match spec.group.kind {
            GroupKind::Cyclic => {
                let [q] = spec.group.orders[..] else {
                    return Err(Failure::Input("cyclic groups take exactly one order".into()));
                };
                (Arc::new(FiniteGroup::cyclic(q).map_err(input)?), None)
            }
            GroupKind::Abelian => (Arc::new(FiniteGroup::abelian(&spec.group.orders).map_err(input)?), None),
            GroupKind::Heisenberg => {
                let q = spec.group.q.ok_or_else(|| Failure::Input("heisenberg needs q".into()))?;
                let h = Heisenberg::new(q).map_err(input)?;
                (h.group.clone(), Some(h))
            }
            GroupKind::Quaternion => (Arc::new(FiniteGroup::quaternion()), None),
        };
        if group.p() as u64 != spec.ring.p {
            return Err(Failure::Input(format!("{} is not a {}-group", group.name(), spec.ring.p)));
        }
        let modulus = spec.character_modulus.unwrap_or(spec.ring.p);
        let characters = spec
            .characters
            .iter()
            .map(|imgs| Character::from_generator_images(&group, imgs, modulus).map_err(input))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Instance { spec, group, heisenberg, ring, characters })
    }

    pub fn need_characters(&self, k: usize) -> Result<&[Character], Failure> {
        if self.characters.len() < k {
            return Err(Failure::Input(format!("need {k} characters, got {}", self.characters.len())));
        }
        Ok(&self.characters[..k])
    }

    pub fn trivial(&self) -> GMod {
        GMod::trivial(self.group.clone(), self.ring, self.spec.module.rank)
    }

    /// `π: G → H` for `H` the coimage of the characters, the identity without any.
    pub fn projection(&self) -> Result<GroupHom, Failure> {
        if self.characters.is_empty() {
            return Ok(GroupHom::identity(self.group.clone()));
        }
        Ok(coimage(&self.group, &self.characters).map_err(input)?.1)
    }

    pub fn module(&self) -> Result<GMod, Failure> {
        let pi = self.projection()?;
        match self.spec.module.kind {
            ModuleKind::Trivial => Ok(self.trivial()),
            ModuleKind::Regular => Ok(GMod::permutation(&pi, self.ring)),
            ModuleKind::Truncated => {
                let depth = self.spec.module.depth.ok_or_else(|| Failure::Input("truncated module needs depth".into()))?;
                let omega = GroupRing::new(self.ring, pi.target().clone());
                let filt = augmentation_powers(&omega, depth);
                let q = filt.truncation(depth, &BasisStyle::Generic).map_err(input)?;
                Ok(GMod::from_quotient_ring(&pi, &q))
            }
        }
    }

    /// `λ` as a cochain with values in `F_p`.
    pub fn lambda(&self) -> Result<Cochain, Failure> {
        let imgs = self.spec.lambda.as_ref().ok_or_else(|| Failure::Input("lambda is required".into()))?;
        let f = ModRing::new(self.spec.ring.p, 1).map_err(input)?;
        let chi = Character::from_generator_images(&self.group, imgs, self.spec.ring.p).map_err(input)?;
        Ok(Cochain::from_character(f, &chi))
    }

    /// A degree-one cochain with values given on every group element.
    pub fn cochain(&self, values: &[i64]) -> Result<Cochain, Failure> {
        if values.len() != self.group.order() {
            return Err(Failure::Input(format!("expected {} values, got {}", self.group.order(), values.len())));
        }
        let v = values.iter().map(|&x| self.ring.from_i64(x)).collect();
        Ok(Cochain::from_values(self.ring, 1, self.group.order(), 1, v))
    }
}
