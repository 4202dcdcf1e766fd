//! Python bindings: recipes, kinetic worlds, ecological runs, metrics and
//! interactive sessions.

use std::sync::Arc;

use pyo3::exceptions::{PyIndexError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyBytes;

use swarmchem::eco::{
    make_initial_world, Condition, EcoConfig, EcoSim as CoreEcoSim, InitialKind, WorldSpec,
};
use swarmchem::interactive::{
    read_log, write_log, Mode, Operator, Session as CoreSession, SessionConfig, TileId,
};
use swarmchem::metrics::{
    decode_ppm, encode_ppm, exploration_series, render_at, structuredness, SnapshotBitmap,
    DEFAULT_RESOLUTION,
};
use swarmchem::params::{PARAM_COUNT, PARAM_NAMES};
use swarmchem::{designs, parse_recipe, random_recipe, KineticParams as CoreParams, SimRng};

fn value_err(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

/// One particle type's eight kinetic parameters, clamped to their ranges.
#[pyclass(name = "KineticParams", module = "swarmchem", frozen, skip_from_py_object)]
#[derive(Clone, Copy)]
struct KineticParams(CoreParams);

#[pymethods]
impl KineticParams {
    #[new]
    fn new(values: Vec<f64>) -> PyResult<Self> {
        let arr: [f64; PARAM_COUNT] = values
            .try_into()
            .map_err(|v: Vec<f64>| value_err(format!("expected {PARAM_COUNT} values, got {}", v.len())))?;
        Ok(Self(CoreParams::clamped(arr)))
    }

    #[staticmethod]
    fn names() -> Vec<&'static str> {
        PARAM_NAMES.to_vec()
    }

    fn to_list(&self) -> Vec<f64> {
        self.0.to_array().to_vec()
    }

    #[getter]
    fn perception(&self) -> f64 {
        self.0.perception
    }

    #[getter]
    fn max_speed(&self) -> f64 {
        self.0.max_speed
    }

    fn __eq__(&self, other: &Self) -> bool {
        self.0 == other.0
    }

    fn __repr__(&self) -> String {
        format!("KineticParams({:?})", self.0.to_array())
    }
}

/// A recipe: weighted list of kinetic parameter sets.
#[pyclass(name = "Recipe", module = "swarmchem", frozen)]
struct Recipe(Arc<swarmchem::Recipe>);

#[pymethods]
impl Recipe {
    /// Parses the text format, one `count * (R, Vn, Vm, c1, c2, c3, c4, c5)` per line.
    #[staticmethod]
    fn parse(text: &str) -> PyResult<Self> {
        parse_recipe(text).map(|r| Self(Arc::new(r))).map_err(value_err)
    }

    #[staticmethod]
    #[pyo3(signature = (seed, types = 1, count = 50))]
    fn random(seed: u64, types: usize, count: u32) -> PyResult<Self> {
        if types == 0 || count == 0 {
            return Err(value_err("types and count must be positive"));
        }
        Ok(Self(Arc::new(random_recipe(&mut SimRng::new(seed), types, count))))
    }

    /// A bundled example design by name.
    #[staticmethod]
    fn design(name: &str) -> PyResult<Self> {
        designs::by_name(name)
            .map(|r| Self(Arc::new(r)))
            .ok_or_else(|| value_err(format!("unknown design `{name}`; known: {}", designs::NAMES.join(", "))))
    }

    fn to_text(&self) -> String {
        self.0.to_text()
    }

    /// `(count, KineticParams)` per entry.
    fn entries(&self) -> Vec<(u32, KineticParams)> {
        self.0.entries().iter().map(|e| (e.count, KineticParams(e.params))).collect()
    }

    #[getter]
    fn total_count(&self) -> u64 {
        self.0.total_count()
    }

    fn __len__(&self) -> usize {
        self.0.len()
    }

    fn __eq__(&self, other: &Self) -> bool {
        self.0 == other.0
    }

    fn __str__(&self) -> String {
        self.0.to_text()
    }

    fn __repr__(&self) -> String {
        format!("Recipe({} entries, {} particles)", self.0.len(), self.0.total_count())
    }
}

/// A kinetic-only world built from one recipe.
#[pyclass(name = "World", module = "swarmchem")]
struct World(swarmchem::World);

#[pymethods]
impl World {
    #[new]
    #[pyo3(signature = (recipe, side = 300.0, seed = 0))]
    fn new(recipe: &Recipe, side: f64, seed: u64) -> PyResult<Self> {
        if !(side > 0.0 && side.is_finite()) {
            return Err(value_err("side must be positive"));
        }
        Ok(Self(swarmchem::World::from_recipe(recipe.0.clone(), side, seed)))
    }

    #[pyo3(signature = (steps = 1))]
    fn step(&mut self, py: Python<'_>, steps: u64) {
        let w = &mut self.0;
        py.detach(|| {
            for _ in 0..steps {
                w.step_kinetics();
            }
        });
    }

    #[getter]
    fn time(&self) -> u64 {
        self.0.time()
    }

    #[getter]
    fn side(&self) -> f64 {
        self.0.side()
    }

    fn __len__(&self) -> usize {
        self.0.len()
    }

    fn positions(&self) -> Vec<(f64, f64)> {
        self.0.particles().iter().map(|p| (p.pos.x, p.pos.y)).collect()
    }

    fn velocities(&self) -> Vec<(f64, f64)> {
        self.0.particles().iter().map(|p| (p.vel.x, p.vel.y)).collect()
    }

    /// Indices of particles within `radius` of particle `i` (no wrapping).
    fn neighbors(&self, i: usize, radius: f64) -> PyResult<Vec<usize>> {
        if i >= self.0.len() {
            return Err(PyIndexError::new_err(format!("particle {i} out of range")));
        }
        if !(radius > 0.0 && radius <= swarmchem::params::MAX_PERCEPTION) {
            return Err(value_err("radius must be in (0, 300]"));
        }
        Ok(self.0.neighbors(i, radius))
    }

    #[pyo3(signature = (resolution = DEFAULT_RESOLUTION))]
    fn render_ppm<'py>(&self, py: Python<'py>, resolution: u32) -> Bound<'py, PyBytes> {
        PyBytes::new(py, &encode_ppm(&render_at(&self.0, resolution, resolution)))
    }

    fn checkpoint(&self) -> String {
        self.0.to_checkpoint()
    }

    #[staticmethod]
    fn from_checkpoint(text: &str) -> PyResult<Self> {
        swarmchem::World::from_checkpoint(text).map(Self).map_err(value_err)
    }
}

/// An ecological run: transmission, competition, mutation, perturbation.
#[pyclass(name = "EcoSim", module = "swarmchem")]
struct EcoSim(CoreEcoSim);

#[pymethods]
impl EcoSim {
    /// `condition` is a preset name or None for defaults; `config_json`
    /// overrides it with a full JSON-encoded configuration. `recipe` selects
    /// the designed initial condition.
    #[new]
    #[pyo3(signature = (seed = 0, condition = None, recipe = None, side = 5000.0, particles = 10_000, random_active = None, config_json = None))]
    fn new(
        seed: u64,
        condition: Option<&str>,
        recipe: Option<&Recipe>,
        side: f64,
        particles: usize,
        random_active: Option<usize>,
        config_json: Option<&str>,
    ) -> PyResult<Self> {
        let config = match (config_json, condition) {
            (Some(json), _) => serde_json::from_str::<EcoConfig>(json).map_err(value_err)?,
            (None, Some(name)) => name.parse::<Condition>().map_err(value_err)?.config(),
            (None, None) => EcoConfig::default(),
        };
        config.validate().map_err(value_err)?;
        let mut spec = WorldSpec::scaled(side, particles);
        if let Some(n) = random_active {
            spec.random_active = n;
        }
        let kind = match recipe {
            Some(r) => InitialKind::Designed(Some(r.0.clone())),
            None => InitialKind::Random,
        };
        let world = make_initial_world(&kind, &spec, seed).map_err(value_err)?;
        Ok(Self(CoreEcoSim::new(world, config)))
    }

    #[pyo3(signature = (steps = 1))]
    fn step(&mut self, py: Python<'_>, steps: u64) {
        let sim = &mut self.0;
        py.detach(|| sim.run(steps));
    }

    #[getter]
    fn time(&self) -> u64 {
        self.0.time()
    }

    #[getter]
    fn active_count(&self) -> usize {
        self.0.world().active_count()
    }

    fn __len__(&self) -> usize {
        self.0.world().len()
    }

    fn config_json(&self) -> String {
        serde_json::to_string(self.0.config()).expect("config serializes")
    }

    fn positions(&self) -> Vec<(f64, f64)> {
        self.0.world().particles().iter().map(|p| (p.pos.x, p.pos.y)).collect()
    }

    /// Number of distinct recipes carried by active particles.
    fn distinct_recipes(&self) -> usize {
        let mut seen: Vec<&swarmchem::Recipe> = Vec::new();
        for p in self.0.world().particles() {
            if let Some(c) = &p.carried {
                if !seen.iter().any(|r| **r == *c.recipe) {
                    seen.push(&c.recipe);
                }
            }
        }
        seen.len()
    }

    #[pyo3(signature = (resolution = DEFAULT_RESOLUTION))]
    fn render_ppm<'py>(&self, py: Python<'py>, resolution: u32) -> Bound<'py, PyBytes> {
        PyBytes::new(py, &encode_ppm(&render_at(self.0.world(), resolution, resolution)))
    }
}

fn decode_all(snapshots: Vec<Vec<u8>>) -> PyResult<Vec<SnapshotBitmap>> {
    snapshots
        .iter()
        .enumerate()
        .map(|(i, b)| decode_ppm(b, i as u64).map_err(value_err))
        .collect()
}

/// Structuredness (KL divergence from the uniform reference) of a P6 snapshot.
#[pyfunction]
fn snapshot_structuredness(py: Python<'_>, ppm: Vec<u8>) -> PyResult<f64> {
    let bmp = decode_ppm(&ppm, 0).map_err(value_err)?;
    py.detach(|| structuredness(&bmp)).map_err(value_err)
}

/// New type colors per snapshot in an ordered sequence of P6 snapshots.
#[pyfunction]
fn snapshot_exploration(snapshots: Vec<Vec<u8>>) -> PyResult<Vec<u64>> {
    Ok(exploration_series(&decode_all(snapshots)?))
}

/// An interactive evolution session.
#[pyclass(name = "Session", module = "swarmchem")]
struct Session(CoreSession);

fn session_err(e: swarmchem::interactive::SessionError) -> PyErr {
    value_err(e)
}

#[pymethods]
impl Session {
    /// `mode` is "hiec" or "niec".
    #[new]
    #[pyo3(signature = (mode = "hiec", tiles = 6, seed = 0))]
    fn new(mode: &str, tiles: usize, seed: u64) -> PyResult<Self> {
        Ok(Self(CoreSession::new(parse_mode(mode)?, SessionConfig::default(), seed, tiles)))
    }

    /// Rebuilds a session from its seed and a JSON-lines operator log.
    #[staticmethod]
    #[pyo3(signature = (mode, tiles, seed, log))]
    fn replay(mode: &str, tiles: usize, seed: u64, log: &str) -> PyResult<Self> {
        let records = read_log(log).map_err(value_err)?;
        CoreSession::replay(parse_mode(mode)?, SessionConfig::default(), seed, tiles, &records)
            .map(Self)
            .map_err(session_err)
    }

    fn tile_ids(&self) -> Vec<u64> {
        self.0.tiles().iter().map(|t| t.id.0).collect()
    }

    fn recipe(&self, tile: u64) -> PyResult<Recipe> {
        self.0.tile(TileId(tile)).map(|t| Recipe(t.recipe.clone())).map_err(session_err)
    }

    fn mutate(&mut self, tile: u64) -> PyResult<u64> {
        self.one(Operator::Mutate { tile: TileId(tile) })
    }

    fn mix(&mut self, a: u64, b: u64) -> PyResult<u64> {
        self.one(Operator::Mix { a: TileId(a), b: TileId(b) })
    }

    fn replicate(&mut self, tile: u64) -> PyResult<u64> {
        self.one(Operator::Replicate { tile: TileId(tile) })
    }

    fn kill(&mut self, tile: u64) -> PyResult<()> {
        self.0.apply(&Operator::Kill { tile: TileId(tile) }).map(|_| ()).map_err(session_err)
    }

    fn random(&mut self) -> PyResult<u64> {
        self.one(Operator::Random)
    }

    /// Next generation from one or two selected tiles; returns the new ids.
    fn niec_select(&mut self, tiles: Vec<u64>) -> PyResult<Vec<u64>> {
        let op = Operator::NiecSelect {
            tiles: tiles.into_iter().map(TileId).collect(),
        };
        self.0
            .apply(&op)
            .map(|ids| ids.into_iter().map(|t| t.0).collect())
            .map_err(session_err)
    }

    fn step(&mut self, py: Python<'_>, steps: u64) {
        let s = &mut self.0;
        py.detach(|| s.step_tiles(steps));
    }

    /// The operator log as JSON lines.
    fn log(&self) -> String {
        write_log(self.0.history())
    }

    #[getter]
    fn generation(&self) -> u64 {
        self.0.generation()
    }
}

impl Session {
    fn one(&mut self, op: Operator) -> PyResult<u64> {
        self.0.apply(&op).map(|ids| ids[0].0).map_err(session_err)
    }
}

fn parse_mode(mode: &str) -> PyResult<Mode> {
    match mode {
        "hiec" => Ok(Mode::Hiec),
        "niec" => Ok(Mode::Niec),
        other => Err(value_err(format!("mode must be hiec or niec, got `{other}`"))),
    }
}

#[pymodule]
#[pyo3(name = "swarmchem")]
fn swarmchem_module(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<KineticParams>()?;
    m.add_class::<Recipe>()?;
    m.add_class::<World>()?;
    m.add_class::<EcoSim>()?;
    m.add_class::<Session>()?;
    m.add_function(wrap_pyfunction!(snapshot_structuredness, m)?)?;
    m.add_function(wrap_pyfunction!(snapshot_exploration, m)?)?;
    m.add("CONDITIONS", Condition::ALL.iter().map(|c| c.name()).collect::<Vec<_>>())?;
    m.add("DESIGNS", designs::NAMES.to_vec())?;
    Ok(())
}
