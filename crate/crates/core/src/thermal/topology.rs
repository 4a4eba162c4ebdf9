//! Model structure (which couplings and gains exist) and the physical
//! parameter vector that fills it.

use super::ThermalError;

/// Named model architectures. The house family fits residential data, the
/// C family commercial data; `Custom` covers hand-built structures such as
/// truth plants.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RcPreset {
    R1,
    R2,
    R4,
    C1,
    C2,
    Custom,
}

impl RcPreset {
    pub fn name(&self) -> &'static str {
        match self {
            RcPreset::R1 => "R-1",
            RcPreset::R2 => "R-2",
            RcPreset::R4 => "R-4",
            RcPreset::C1 => "C-1",
            RcPreset::C2 => "C-2",
            RcPreset::Custom => "custom",
        }
    }

    pub fn parse(s: &str) -> Option<RcPreset> {
        match s {
            "R-1" => Some(RcPreset::R1),
            "R-2" => Some(RcPreset::R2),
            "R-4" => Some(RcPreset::R4),
            "C-1" => Some(RcPreset::C1),
            "C-2" => Some(RcPreset::C2),
            "custom" => Some(RcPreset::Custom),
            _ => None,
        }
    }
}

impl std::fmt::Display for RcPreset {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// Which couplings and gain paths exist. Every hidden node always couples to
/// the zone; ambient coupling, wall-wall coupling, and the three gain paths
/// are structural choices that decide the free-parameter count.
#[derive(Debug, Clone, PartialEq)]
pub struct RcTopology {
    /// Number of unmeasured wall/mass nodes N.
    pub n_hidden: usize,
    /// Symmetric wall-wall coupling flags, false on the diagonal.
    pub wall_wall_coupled: Vec<Vec<bool>>,
    /// Whether hidden node i couples to ambient (carries r_wa_i).
    pub wall_ambient: Vec<bool>,
    /// Whether the zone node receives internal gains (carries b_z).
    pub zone_internal_gain: bool,
    /// Whether the zone node receives solar gains (carries d_z).
    pub zone_solar_gain: bool,
    /// Whether hidden nodes receive gains; each node then carries one shared
    /// fraction applied to both internal and solar heat (b_w_i = d_w_i).
    pub gains_on_walls: bool,
    pub preset: RcPreset,
}

impl RcTopology {
    pub fn preset(p: RcPreset) -> RcTopology {
        match p {
            RcPreset::R1 => RcTopology {
                n_hidden: 0,
                wall_wall_coupled: vec![],
                wall_ambient: vec![],
                zone_internal_gain: true,
                zone_solar_gain: true,
                gains_on_walls: false,
                preset: p,
            },
            RcPreset::R2 => RcTopology {
                n_hidden: 1,
                wall_wall_coupled: vec![vec![false]],
                wall_ambient: vec![true],
                zone_internal_gain: false,
                zone_solar_gain: true,
                gains_on_walls: false,
                preset: p,
            },
            RcPreset::R4 => RcTopology {
                n_hidden: 3,
                wall_wall_coupled: vec![vec![false; 3]; 3],
                wall_ambient: vec![false; 3],
                zone_internal_gain: false,
                zone_solar_gain: false,
                gains_on_walls: true,
                preset: p,
            },
            RcPreset::C1 => RcTopology {
                n_hidden: 0,
                wall_wall_coupled: vec![],
                wall_ambient: vec![],
                zone_internal_gain: false,
                zone_solar_gain: false,
                gains_on_walls: false,
                preset: p,
            },
            RcPreset::C2 => RcTopology {
                n_hidden: 1,
                wall_wall_coupled: vec![vec![false]],
                wall_ambient: vec![true],
                zone_internal_gain: false,
                zone_solar_gain: false,
                gains_on_walls: false,
                preset: p,
            },
            RcPreset::Custom => panic!("custom topologies are built directly, not from a preset"),
        }
    }

    pub fn n_states(&self) -> usize {
        1 + self.n_hidden
    }

    /// Wall-wall coupled pairs (i, j) with i < j, row-major order.
    pub fn coupled_pairs(&self) -> Vec<(usize, usize)> {
        let mut pairs = Vec::new();
        for i in 0..self.n_hidden {
            for j in (i + 1)..self.n_hidden {
                if self.wall_wall_coupled[i][j] {
                    pairs.push((i, j));
                }
            }
        }
        pairs
    }

    pub fn n_wall_ambient(&self) -> usize {
        self.wall_ambient.iter().filter(|&&b| b).count()
    }

    /// Count of free parameters this structure exposes to an estimator.
    pub fn free_parameter_count(&self) -> usize {
        2 // r_za, c_z
            + 1 // a_z
            + 2 * self.n_hidden // r_zw_i, c_w_i
            + self.n_wall_ambient()
            + self.coupled_pairs().len()
            + usize::from(self.zone_internal_gain)
            + usize::from(self.zone_solar_gain)
            + if self.gains_on_walls { self.n_hidden } else { 0 }
    }

    pub fn validate(&self) -> Result<(), ThermalError> {
        let n = self.n_hidden;
        if self.wall_wall_coupled.len() != n
            || self.wall_wall_coupled.iter().any(|row| row.len() != n)
        {
            return Err(ThermalError::Topology(format!(
                "wall_wall_coupled must be {n}x{n}"
            )));
        }
        for i in 0..n {
            if self.wall_wall_coupled[i][i] {
                return Err(ThermalError::Topology(format!(
                    "wall_wall_coupled diagonal must be false (node {i})"
                )));
            }
            for j in 0..n {
                if self.wall_wall_coupled[i][j] != self.wall_wall_coupled[j][i] {
                    return Err(ThermalError::Topology(format!(
                        "wall_wall_coupled must be symmetric at ({i}, {j})"
                    )));
                }
            }
        }
        if self.wall_ambient.len() != n {
            return Err(ThermalError::Topology(format!(
                "wall_ambient must have length {n}"
            )));
        }
        Ok(())
    }
}

/// Physical parameters filling an [`RcTopology`]: resistances in °C/W,
/// capacitances in J/°C, gain fractions dimensionless in [0, 1].
#[derive(Debug, Clone, PartialEq)]
pub struct RcParameters {
    /// Zone-ambient resistance.
    pub r_za: f64,
    /// Zone-wall resistances, one per hidden node.
    pub r_zw: Vec<f64>,
    /// Wall-wall resistances aligned with `topology.coupled_pairs()`.
    pub r_w: Vec<f64>,
    /// Wall-ambient resistances; `Some` exactly where the topology couples.
    pub r_wa: Vec<Option<f64>>,
    /// Zone capacitance.
    pub c_z: f64,
    /// Wall capacitances, one per hidden node.
    pub c_w: Vec<f64>,
    /// HVAC heat fraction reaching the zone node.
    pub a_z: f64,
    /// Internal-gain fraction on the zone node (0 when the path is absent).
    pub b_z: f64,
    /// Solar fraction on the zone node (0 when the path is absent).
    pub d_z: f64,
    /// Shared per-node wall gain fraction (internal and solar alike); empty
    /// unless `gains_on_walls`.
    pub wall_gain: Vec<f64>,
}

impl RcParameters {
    pub fn validate(&self, topo: &RcTopology) -> Result<(), ThermalError> {
        topo.validate()?;
        let n = topo.n_hidden;
        let check_pos = |name: &str, v: f64| -> Result<(), ThermalError> {
            if !(v.is_finite() && v > 0.0) {
                Err(ThermalError::NonPositive {
                    name: name.to_string(),
                    value: v,
                })
            } else {
                Ok(())
            }
        };
        let check_frac = |name: &str, v: f64| -> Result<(), ThermalError> {
            if !(v.is_finite() && (0.0..=1.0).contains(&v)) {
                Err(ThermalError::FractionOutOfRange {
                    name: name.to_string(),
                    value: v,
                })
            } else {
                Ok(())
            }
        };
        check_pos("r_za", self.r_za)?;
        check_pos("c_z", self.c_z)?;
        if self.r_zw.len() != n || self.c_w.len() != n || self.r_wa.len() != n {
            return Err(ThermalError::ParameterShape(format!(
                "per-node vectors must have length {n}"
            )));
        }
        for i in 0..n {
            check_pos(&format!("r_zw[{i}]"), self.r_zw[i])?;
            check_pos(&format!("c_w[{i}]"), self.c_w[i])?;
            match (topo.wall_ambient[i], self.r_wa[i]) {
                (true, Some(v)) => check_pos(&format!("r_wa[{i}]"), v)?,
                (true, None) => {
                    return Err(ThermalError::ParameterShape(format!(
                        "node {i} couples to ambient but r_wa[{i}] is missing"
                    )))
                }
                (false, Some(_)) => {
                    return Err(ThermalError::ParameterShape(format!(
                        "node {i} has no ambient coupling but r_wa[{i}] is set"
                    )))
                }
                (false, None) => {}
            }
        }
        let pairs = topo.coupled_pairs();
        if self.r_w.len() != pairs.len() {
            return Err(ThermalError::ParameterShape(format!(
                "r_w has {} entries for {} coupled pairs",
                self.r_w.len(),
                pairs.len()
            )));
        }
        for (k, &(i, j)) in pairs.iter().enumerate() {
            check_pos(&format!("r_w[{i}][{j}]"), self.r_w[k])?;
        }
        check_frac("a_z", self.a_z)?;
        check_frac("b_z", self.b_z)?;
        check_frac("d_z", self.d_z)?;
        if !topo.zone_internal_gain && self.b_z != 0.0 {
            return Err(ThermalError::ParameterShape(
                "b_z must be 0 when the zone internal-gain path is absent".into(),
            ));
        }
        if !topo.zone_solar_gain && self.d_z != 0.0 {
            return Err(ThermalError::ParameterShape(
                "d_z must be 0 when the zone solar path is absent".into(),
            ));
        }
        if topo.gains_on_walls {
            if self.wall_gain.len() != n {
                return Err(ThermalError::ParameterShape(format!(
                    "wall_gain must have length {n}"
                )));
            }
            for (i, &g) in self.wall_gain.iter().enumerate() {
                check_frac(&format!("wall_gain[{i}]"), g)?;
            }
        } else if !self.wall_gain.is_empty() {
            return Err(ThermalError::ParameterShape(
                "wall_gain must be empty when walls carry no gains".into(),
            ));
        }
        Ok(())
    }

    /// Convenience constructor for a 1-state model (no hidden nodes).
    pub fn single_node(r_za: f64, c_z: f64, a_z: f64, b_z: f64, d_z: f64) -> RcParameters {
        RcParameters {
            r_za,
            r_zw: vec![],
            r_w: vec![],
            r_wa: vec![],
            c_z,
            c_w: vec![],
            a_z,
            b_z,
            d_z,
            wall_gain: vec![],
        }
    }
}
