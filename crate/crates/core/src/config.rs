//! Configuration records and the flat `key = value` config format.

use std::f64::consts::{PI, TAU};

use crate::error::{Error, Result};

/// Range-bearing sensor with a symmetric field of view.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SensorModel {
    /// Full angular width (radians).
    pub fov: f64,
    pub max_range: f64,
    pub range_noise_std: f64,
    pub bearing_noise_std: f64,
    /// Per-component odometry noise `(x, y, theta)` for each motion step.
    pub odom_noise_std: [f64; 3],
}

impl SensorModel {
    pub fn validate(&self) -> Result<()> {
        if !(self.fov > 0.0 && self.fov <= TAU) {
            return Err(Error::invalid("sensor fov must lie in (0, 2π]"));
        }
        if !(self.max_range > 0.0) {
            return Err(Error::invalid("sensor max_range must be positive"));
        }
        let stds = [self.range_noise_std, self.bearing_noise_std]
            .into_iter()
            .chain(self.odom_noise_std);
        for s in stds {
            if !(s >= 0.0) || !s.is_finite() {
                return Err(Error::invalid("noise standard deviations must be finite and nonnegative"));
            }
        }
        Ok(())
    }

    /// Noise-free sensor with the given geometry.
    pub fn ideal(fov: f64, max_range: f64) -> Self {
        Self {
            fov,
            max_range,
            range_noise_std: 0.0,
            bearing_noise_std: 0.0,
            odom_noise_std: [0.0; 3],
        }
    }
}

impl Default for SensorModel {
    fn default() -> Self {
        Self {
            fov: 2.0 * PI / 3.0,
            max_range: 5.0,
            range_noise_std: 0.05,
            bearing_noise_std: 0.01,
            odom_noise_std: [0.02, 0.02, 0.01],
        }
    }
}

/// Covisibility bounds for predicted loop closures.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LoopClosureParams {
    pub n_p_min: usize,
    pub n_p_max: usize,
}

impl LoopClosureParams {
    pub fn new(n_p_min: usize, n_p_max: usize) -> Result<Self> {
        let p = Self { n_p_min, n_p_max };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_p_min == 0 || self.n_p_min > self.n_p_max {
            return Err(Error::invalid("loop-closure bounds need 0 < n_p_min <= n_p_max"));
        }
        Ok(())
    }
}

impl Default for LoopClosureParams {
    fn default() -> Self {
        Self { n_p_min: 3, n_p_max: 6 }
    }
}

/// Disc used to measure how much unseen area a predicted pose would reveal.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoveltyParams {
    pub radius: f64,
}

impl Default for NoveltyParams {
    fn default() -> Self {
        Self { radius: 1.5 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MappingConfig {
    pub resolution: f64,
    pub min_info_radius_cells: usize,
    pub max_age: usize,
    pub bandwidth: f64,
    pub rrt_step: f64,
    pub rrt_iterations: usize,
}

impl Default for MappingConfig {
    fn default() -> Self {
        Self {
            resolution: 0.1,
            min_info_radius_cells: 10,
            max_age: 3,
            bandwidth: 0.75,
            rrt_step: 0.5,
            rrt_iterations: 300,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlannerConfig {
    pub inflation_radius: f64,
    /// Cost multiplier next to an obstacle; decays linearly to 1 at the
    /// inflation radius.
    pub max_inflated_cost: f64,
    /// Arc-length spacing of hallucinated vertices.
    pub spacing: f64,
}

impl Default for PlannerConfig {
    fn default() -> Self {
        Self {
            inflation_radius: 0.3,
            max_inflated_cost: 5.0,
            spacing: 1.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FrontendConfig {
    /// Minimum shared landmarks for a non-consecutive pose-graph edge.
    pub covisibility_threshold: usize,
    pub damping: f64,
}

impl Default for FrontendConfig {
    fn default() -> Self {
        Self {
            covisibility_threshold: 3,
            damping: 1e-9,
        }
    }
}

/// Everything `run_episode` needs besides the world and the seed.
#[derive(Debug, Clone, PartialEq)]
pub struct ExplorationConfig {
    /// Landmark sensor (stands in for the camera).
    pub camera: SensorModel,
    /// Ranging sensor used to build the occupancy grid.
    pub scan: SensorModel,
    pub loop_closure: LoopClosureParams,
    pub novelty: NoveltyParams,
    pub mapping: MappingConfig,
    pub planner: PlannerConfig,
    pub frontend: FrontendConfig,
    pub epoch_cap: usize,
    /// Arc length travelled between consecutive keyframes (meters).
    pub sense_interval: f64,
    /// Simulated travel speed (m/s) used for the mission clock.
    pub speed: f64,
    /// Parallel candidate-evaluation workers.
    pub jobs: usize,
}

impl Default for ExplorationConfig {
    fn default() -> Self {
        Self {
            camera: SensorModel::default(),
            scan: SensorModel {
                fov: TAU,
                max_range: 4.0,
                range_noise_std: 0.0,
                bearing_noise_std: 0.0,
                odom_noise_std: [0.0; 3],
            },
            loop_closure: LoopClosureParams::default(),
            novelty: NoveltyParams::default(),
            mapping: MappingConfig::default(),
            planner: PlannerConfig::default(),
            frontend: FrontendConfig::default(),
            epoch_cap: 200,
            sense_interval: 0.5,
            speed: 0.3,
            jobs: 1,
        }
    }
}

macro_rules! config_keys {
    ($( $key:literal => [$($field:tt)+] : $ty:ty ),* $(,)?) => {
        impl ExplorationConfig {
            /// All recognised keys, in printing order.
            pub const KEYS: &'static [&'static str] = &[$($key),*];

            pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
                match key {
                    $($key => {
                        self.$($field)+ = value.trim().parse::<$ty>().map_err(|_| {
                            Error::invalid(format!("bad value '{}' for key '{}'", value.trim(), key))
                        })?;
                    })*
                    _ => return Err(Error::invalid(format!("unknown config key '{key}'"))),
                }
                Ok(())
            }

            pub fn get(&self, key: &str) -> Option<String> {
                match key {
                    $($key => Some(self.$($field)+.to_string()),)*
                    _ => None,
                }
            }
        }
    };
}

config_keys! {
    "camera.fov" => [camera.fov]: f64,
    "camera.max_range" => [camera.max_range]: f64,
    "camera.range_noise_std" => [camera.range_noise_std]: f64,
    "camera.bearing_noise_std" => [camera.bearing_noise_std]: f64,
    "odom.noise_x" => [camera.odom_noise_std[0]]: f64,
    "odom.noise_y" => [camera.odom_noise_std[1]]: f64,
    "odom.noise_theta" => [camera.odom_noise_std[2]]: f64,
    "scan.fov" => [scan.fov]: f64,
    "scan.max_range" => [scan.max_range]: f64,
    "loop_closure.n_p_min" => [loop_closure.n_p_min]: usize,
    "loop_closure.n_p_max" => [loop_closure.n_p_max]: usize,
    "novelty.radius" => [novelty.radius]: f64,
    "mapping.resolution" => [mapping.resolution]: f64,
    "mapping.min_info_radius_cells" => [mapping.min_info_radius_cells]: usize,
    "mapping.max_age" => [mapping.max_age]: usize,
    "mapping.bandwidth" => [mapping.bandwidth]: f64,
    "mapping.rrt_step" => [mapping.rrt_step]: f64,
    "mapping.rrt_iterations" => [mapping.rrt_iterations]: usize,
    "planner.inflation_radius" => [planner.inflation_radius]: f64,
    "planner.max_inflated_cost" => [planner.max_inflated_cost]: f64,
    "planner.spacing" => [planner.spacing]: f64,
    "frontend.covisibility_threshold" => [frontend.covisibility_threshold]: usize,
    "frontend.damping" => [frontend.damping]: f64,
    "exploration.epoch_cap" => [epoch_cap]: usize,
    "exploration.sense_interval" => [sense_interval]: f64,
    "exploration.speed" => [speed]: f64,
    "exploration.jobs" => [jobs]: usize,
}

impl ExplorationConfig {
    pub fn validate(&self) -> Result<()> {
        self.camera.validate()?;
        self.scan.validate()?;
        self.loop_closure.validate()?;
        let positive = [
            ("novelty.radius", self.novelty.radius),
            ("mapping.resolution", self.mapping.resolution),
            ("mapping.bandwidth", self.mapping.bandwidth),
            ("mapping.rrt_step", self.mapping.rrt_step),
            ("planner.spacing", self.planner.spacing),
            ("exploration.sense_interval", self.sense_interval),
            ("exploration.speed", self.speed),
        ];
        for (k, v) in positive {
            if !(v > 0.0) || !v.is_finite() {
                return Err(Error::invalid(format!("{k} must be positive")));
            }
        }
        if !(self.planner.inflation_radius >= 0.0) {
            return Err(Error::invalid("planner.inflation_radius must be nonnegative"));
        }
        if !(self.planner.max_inflated_cost >= 1.0) {
            return Err(Error::invalid("planner.max_inflated_cost must be at least 1"));
        }
        if self.frontend.covisibility_threshold == 0 {
            return Err(Error::invalid("frontend.covisibility_threshold must be at least 1"));
        }
        if !(self.frontend.damping >= 0.0) {
            return Err(Error::invalid("frontend.damping must be nonnegative"));
        }
        if self.jobs == 0 {
            return Err(Error::invalid("exploration.jobs must be at least 1"));
        }
        Ok(())
    }

    /// Applies a `key = value` file on top of the current values.
    pub fn apply_text(&mut self, text: &str) -> Result<()> {
        for (n, raw) in text.lines().enumerate() {
            let body = raw.split('#').next().unwrap_or("").trim();
            if body.is_empty() {
                continue;
            }
            let (k, v) = body
                .split_once('=')
                .ok_or_else(|| Error::parse(n + 1, "expected 'key = value'"))?;
            self.set(k.trim(), v).map_err(|e| Error::parse(n + 1, e.to_string()))?;
        }
        Ok(())
    }

    pub fn to_text(&self) -> String {
        Self::KEYS
            .iter()
            .map(|k| format!("{k} = {}\n", self.get(k).unwrap_or_default()))
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_are_valid() {
        ExplorationConfig::default().validate().unwrap();
    }

    #[test]
    fn text_round_trip() {
        let mut c = ExplorationConfig::default();
        c.apply_text("# tuned\nmapping.bandwidth = 1.25\nloop_closure.n_p_max=8 # upper\n")
            .unwrap();
        assert_eq!(c.mapping.bandwidth, 1.25);
        assert_eq!(c.loop_closure.n_p_max, 8);
        let mut d = ExplorationConfig::default();
        d.apply_text(&c.to_text()).unwrap();
        assert_eq!(c, d);
    }

    #[test]
    fn rejects_unknown_and_bad_values() {
        let mut c = ExplorationConfig::default();
        assert!(c.apply_text("nope = 1\n").is_err());
        assert!(c.apply_text("mapping.resolution = fast\n").is_err());
        assert!(c.apply_text("just text\n").is_err());
    }

    #[test]
    fn invalid_ranges() {
        assert!(LoopClosureParams::new(0, 6).is_err());
        assert!(LoopClosureParams::new(7, 6).is_err());
        let mut s = SensorModel::default();
        s.fov = 7.0;
        assert!(s.validate().is_err());
        s.fov = 1.0;
        s.range_noise_std = -1.0;
        assert!(s.validate().is_err());
    }
}
