//! Scenario files: one normal form per case study together with the
//! expected singularities, automorphisms, class-group cohomology and defect,
//! plus the runner that checks every expectation and the report writer.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::autgroups::{
    group_closure, invariance_scalar, singular_point_action, structure_invariants, FiniteMatrixGroup, ProjMatrix, StructureInvariants,
};
use crate::degeneration::SingConfig;
use crate::glattice::{dual_lattice, h1, h2, permutation_module, quotient_lattice, FPLattice, FinGroup, FiniteAbelianGroup, GLattice, Mat};
use crate::linalg::FieldMatrix;
use crate::multipoly::{graded_intersection_dim, parse_number, same_ideal, Exponent, MultiPoly, TermJson};
use crate::numfield::{AlgebraicNumber, FieldDescriptor, FieldRef, NumberField, PrimeField};
use crate::projection::{
    defect_from_components, extract_projection, move_to_origin, qq_rank, swap_with_first, verify_decomposition, DecompositionStatus,
};
use crate::singularities::{classify_ade, modp_singular_scan_with, AdeType, ProjPoint};

pub const SCHEMA_VERSION: u32 = 1;
const NVARS: usize = 5;

#[derive(Debug, Error)]
pub enum ScenarioError {
    #[error("schema error at {pointer}: {message}")]
    Schema { pointer: String, message: String },
    #[error("field mismatch at {pointer}: {message}")]
    FieldMismatch { pointer: String, message: String },
    #[error("cannot read {path}: {message}")]
    Io { path: String, message: String },
}

fn schema(pointer: impl Into<String>, message: impl Into<String>) -> ScenarioError {
    ScenarioError::Schema { pointer: pointer.into(), message: message.into() }
}

fn mismatch(pointer: impl Into<String>, message: impl Into<String>) -> ScenarioError {
    ScenarioError::FieldMismatch { pointer: pointer.into(), message: message.into() }
}

// ---------------------------------------------------------------------------
// Raw file format

#[derive(Deserialize)]
#[serde(untagged)]
enum RawNumber {
    Int(i64),
    Text(String),
    Coeffs(Vec<String>),
}

#[derive(Deserialize)]
#[serde(untagged)]
enum RawPoly {
    Text(String),
    Terms(Vec<TermJson>),
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawScenario {
    schema_version: u32,
    name: String,
    #[serde(default)]
    description: String,
    #[serde(alias = "field_spec")]
    field: FieldDescriptor,
    #[serde(default = "default_nvars")]
    nvars: usize,
    cubic: RawPoly,
    #[serde(alias = "singular_points")]
    points: Vec<RawPoint>,
    expected_config: String,
    scan_primes: Vec<u64>,
    #[serde(default, alias = "aut_generators")]
    generators: Vec<RawGenerator>,
    #[serde(default)]
    groups: Vec<RawGroup>,
    #[serde(default, alias = "lattice_presentations")]
    lattices: Vec<RawLattice>,
    #[serde(default)]
    subgroup_tests: Vec<RawSubgroupTest>,
    #[serde(default, alias = "projection_claims", alias = "projection")]
    projections: Vec<RawProjection>,
}

fn default_nvars() -> usize {
    NVARS
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawPoint {
    name: String,
    coords: Vec<RawNumber>,
    #[serde(rename = "type")]
    ade_type: String,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawGenerator {
    name: String,
    #[serde(default)]
    images: Option<Vec<RawPoly>>,
    #[serde(default)]
    matrix: Option<Vec<Vec<RawNumber>>>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawGroup {
    name: String,
    generators: Vec<String>,
    expected: ExpectedStructure,
    #[serde(default)]
    kernel_order: Option<usize>,
    #[serde(default)]
    point_orbits: Option<Vec<Vec<String>>>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawLattice {
    name: String,
    kind: String,
    #[serde(default)]
    rank: Option<usize>,
    #[serde(default)]
    relations: Vec<Vec<i64>>,
    #[serde(default)]
    action: Option<BTreeMap<String, Vec<Vec<i64>>>>,
    #[serde(default)]
    classes: Option<Vec<RawClass>>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawClass {
    name: String,
    #[serde(default)]
    ideal: Option<Vec<RawPoly>>,
    #[serde(default)]
    hyperplane: bool,
    degree: u32,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSubgroupTest {
    name: String,
    generators: Vec<String>,
    lattice: String,
    expected_h1: String,
    #[serde(default)]
    expected_dual_h1: Option<String>,
    #[serde(default)]
    exceptional_per_point: Option<Vec<u32>>,
    #[serde(default)]
    expected_exceptional_h2: Option<String>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawProjection {
    /// Name of a declared point.
    #[serde(default)]
    point: Option<String>,
    /// 1-based index into the declared points.
    #[serde(default)]
    q_index: Option<usize>,
    #[serde(default)]
    swap_with: Option<usize>,
    #[serde(default)]
    change_images: Option<Vec<RawPoly>>,
    components: Vec<Vec<RawPoly>>,
    primes: Vec<u64>,
    expected_defect: i64,
    #[serde(default)]
    expected_type: Option<String>,
    #[serde(default)]
    expected_qq_rank: Option<usize>,
}

// ---------------------------------------------------------------------------
// Resolved scenario

/// Expected group structure. Only `order` is mandatory; every other field
/// is compared when present.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExpectedStructure {
    pub order: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub abelian: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub abelian_invariants: Option<Vec<u64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub center_order: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub derived_order: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub class_count: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub element_orders: Option<BTreeMap<usize, usize>>,
}

impl ExpectedStructure {
    /// Names of the fields that disagree with `s`.
    pub fn mismatches(&self, s: &StructureInvariants) -> Vec<String> {
        let mut out = Vec::new();
        if self.order != s.order {
            out.push(format!("order {} != {}", s.order, self.order));
        }
        let mut cmp = |name: &str, ok: bool| {
            if !ok {
                out.push(name.to_string());
            }
        };
        cmp("abelian", self.abelian.is_none_or(|a| a == s.abelian));
        cmp("abelian_invariants", self.abelian_invariants.as_ref().is_none_or(|a| *a == s.abelian_invariants));
        cmp("center_order", self.center_order.is_none_or(|a| a == s.center_order));
        cmp("derived_order", self.derived_order.is_none_or(|a| a == s.derived_order));
        cmp("class_count", self.class_count.is_none_or(|a| a == s.class_count));
        cmp("element_orders", self.element_orders.as_ref().is_none_or(|a| *a == s.element_orders));
        out
    }
}

#[derive(Clone, Debug)]
pub struct DeclaredPoint {
    pub name: String,
    pub point: ProjPoint,
    pub ade_type: AdeType,
}

#[derive(Clone, Debug)]
pub struct NamedGenerator {
    pub name: String,
    /// `x*M` gives the images of the coordinates.
    pub matrix: FieldMatrix,
}

#[derive(Clone, Debug)]
pub struct GroupCheck {
    pub name: String,
    /// Indices into `Scenario::generators`.
    pub generators: Vec<usize>,
    pub expected: ExpectedStructure,
    pub kernel_order: Option<usize>,
    /// Orbits on the singular points, as indices into `Scenario::points`.
    pub point_orbits: Option<Vec<Vec<usize>>>,
}

#[derive(Clone, Debug)]
pub struct DivisorClass {
    pub name: String,
    /// `None` for the hyperplane class.
    pub ideal: Option<Vec<MultiPoly>>,
    pub degree: u32,
}

#[derive(Clone, Debug)]
pub enum LatticeBody {
    /// `Z^rank / relations` with matrices given on generators. Column `j` of
    /// a matrix is the image of basis vector `j`.
    Explicit { rank: usize, relations: Vec<Vec<i64>>, action: Vec<(usize, Mat<i64>)> },
    /// Classes of surfaces with ideals; the action is derived from the ideals.
    Divisors { classes: Vec<DivisorClass>, relations: Vec<Vec<i64>> },
}

#[derive(Clone, Debug)]
pub struct LatticePresentation {
    pub name: String,
    pub body: LatticeBody,
}

#[derive(Clone, Debug)]
pub struct SubgroupTest {
    pub name: String,
    pub generators: Vec<usize>,
    pub lattice: usize,
    pub expected_h1: FiniteAbelianGroup,
    pub expected_dual_h1: Option<FiniteAbelianGroup>,
    /// Exceptional divisors over each singular point.
    pub exceptional_per_point: Vec<u32>,
    pub expected_exceptional_h2: Option<FiniteAbelianGroup>,
}

#[derive(Clone, Debug)]
pub struct ProjectionClaim {
    pub point: usize,
    pub change: Option<FieldMatrix>,
    /// Component ideals in the moved coordinates.
    pub components: Vec<Vec<MultiPoly>>,
    pub primes: Vec<u64>,
    pub expected_defect: i64,
    pub expected_type: Option<AdeType>,
    pub expected_qq_rank: Option<usize>,
}

#[derive(Clone, Debug)]
pub struct Scenario {
    pub name: String,
    pub description: String,
    pub field: FieldRef,
    pub cubic: MultiPoly,
    pub points: Vec<DeclaredPoint>,
    pub expected_config: SingConfig,
    pub scan_primes: Vec<u64>,
    pub generators: Vec<NamedGenerator>,
    pub groups: Vec<GroupCheck>,
    pub lattices: Vec<LatticePresentation>,
    pub subgroup_tests: Vec<SubgroupTest>,
    pub projections: Vec<ProjectionClaim>,
}

impl Scenario {
    pub fn generator_index(&self, name: &str) -> Option<usize> {
        self.generators.iter().position(|g| g.name == name)
    }
}

// ---------------------------------------------------------------------------
// Loading

pub fn load_scenario(path: &Path) -> Result<Scenario, ScenarioError> {
    let text = std::fs::read_to_string(path).map_err(|e| ScenarioError::Io { path: path.display().to_string(), message: e.to_string() })?;
    parse_scenario(&text)
}

fn path_to_pointer(path: &serde_path_to_error::Path) -> String {
    use serde_path_to_error::Segment;
    let mut s = String::new();
    for seg in path.iter() {
        match seg {
            Segment::Seq { index } => write!(s, "/{index}").unwrap(),
            Segment::Map { key } => write!(s, "/{}", key.replace('~', "~0").replace('/', "~1")).unwrap(),
            Segment::Enum { variant } => write!(s, "/{variant}").unwrap(),
            Segment::Unknown => s.push_str("/?"),
        }
    }
    if s.is_empty() {
        s.push('/');
    }
    s
}

pub fn parse_scenario(text: &str) -> Result<Scenario, ScenarioError> {
    let de = &mut serde_json::Deserializer::from_str(text);
    let raw: RawScenario = serde_path_to_error::deserialize(de).map_err(|e| schema(path_to_pointer(e.path()), e.inner().to_string()))?;
    Resolver::resolve(raw)
}

struct Resolver {
    field: FieldRef,
}

impl Resolver {
    fn resolve(raw: RawScenario) -> Result<Scenario, ScenarioError> {
        if raw.schema_version != SCHEMA_VERSION {
            return Err(schema("/schema_version", format!("unsupported version {} (expected {SCHEMA_VERSION})", raw.schema_version)));
        }
        if raw.nvars != NVARS {
            return Err(schema("/nvars", format!("cubic must be in {NVARS} variables, got {}", raw.nvars)));
        }
        let field = NumberField::from_descriptor(&raw.field).map_err(|e| schema("/field", e.to_string()))?;
        let r = Resolver { field };

        let cubic = r.poly(&raw.cubic, "/cubic")?;
        if !cubic.is_homogeneous() || cubic.total_degree() != Some(3) {
            return Err(schema("/cubic", "not a homogeneous cubic"));
        }
        if let Some(i) = (0..NVARS).find(|&i| !cubic.uses_var(i)) {
            return Err(schema("/cubic", format!("cubic does not involve x{}; it must be a cubic in {NVARS} variables", i + 1)));
        }

        let mut points = Vec::new();
        for (i, p) in raw.points.iter().enumerate() {
            let ptr = format!("/points/{i}");
            if p.coords.len() != NVARS {
                return Err(schema(format!("{ptr}/coords"), format!("expected {NVARS} coordinates")));
            }
            let coords = p.coords.iter().enumerate().map(|(j, c)| r.number(c, &format!("{ptr}/coords/{j}"))).collect::<Result<Vec<_>, _>>()?;
            let point = ProjPoint::new(coords).ok_or_else(|| schema(format!("{ptr}/coords"), "zero vector"))?;
            let ade_type = p.ade_type.parse::<AdeType>().map_err(|e| schema(format!("{ptr}/type"), e.to_string()))?;
            points.push(DeclaredPoint { name: p.name.clone(), point, ade_type });
        }
        check_unique(points.iter().map(|p| p.name.as_str()), "/points")?;
        let point_index = |name: &str, ptr: &str| -> Result<usize, ScenarioError> {
            points.iter().position(|p| p.name == name).ok_or_else(|| schema(ptr, format!("unknown point {name:?}")))
        };

        let expected_config: SingConfig =
            raw.expected_config.parse().map_err(|e: crate::degeneration::DegenerationError| schema("/expected_config", e.to_string()))?;
        for (i, &p) in raw.scan_primes.iter().enumerate() {
            if !crate::numfield::is_prime(p) || p < 5 {
                return Err(schema(format!("/scan_primes/{i}"), format!("{p} is not a prime >= 5")));
            }
        }

        let mut generators = Vec::new();
        for (i, g) in raw.generators.iter().enumerate() {
            let ptr = format!("/generators/{i}");
            let matrix = match (&g.images, &g.matrix) {
                (Some(images), None) => r.images_matrix(images, &format!("{ptr}/images"))?,
                (None, Some(rows)) => r.rows_matrix(rows, &format!("{ptr}/matrix"))?,
                _ => return Err(schema(&ptr, "exactly one of \"images\" and \"matrix\" is required")),
            };
            if matrix.inverse().is_none() {
                return Err(schema(&ptr, "matrix is singular"));
            }
            generators.push(NamedGenerator { name: g.name.clone(), matrix });
        }
        check_unique(generators.iter().map(|g| g.name.as_str()), "/generators")?;
        let gen_index = |name: &str, ptr: &str| -> Result<usize, ScenarioError> {
            generators.iter().position(|g| g.name == name).ok_or_else(|| schema(ptr, format!("unknown generator {name:?}")))
        };
        let gen_list = |names: &[String], ptr: &str| -> Result<Vec<usize>, ScenarioError> {
            if names.is_empty() {
                return Err(schema(ptr, "at least one generator is required"));
            }
            names.iter().enumerate().map(|(j, n)| gen_index(n, &format!("{ptr}/{j}"))).collect()
        };

        let mut groups = Vec::new();
        for (i, g) in raw.groups.iter().enumerate() {
            let ptr = format!("/groups/{i}");
            let gens = gen_list(&g.generators, &format!("{ptr}/generators"))?;
            let point_orbits = match &g.point_orbits {
                None => None,
                Some(orbits) => Some(
                    orbits
                        .iter()
                        .enumerate()
                        .map(|(j, o)| o.iter().enumerate().map(|(k, n)| point_index(n, &format!("{ptr}/point_orbits/{j}/{k}"))).collect())
                        .collect::<Result<Vec<Vec<usize>>, _>>()?,
                ),
            };
            groups.push(GroupCheck {
                name: g.name.clone(),
                generators: gens,
                expected: g.expected.clone(),
                kernel_order: g.kernel_order,
                point_orbits,
            });
        }

        let mut lattices = Vec::new();
        for (i, l) in raw.lattices.iter().enumerate() {
            let ptr = format!("/lattices/{i}");
            let body = match l.kind.as_str() {
                "explicit" => {
                    let rank = l.rank.ok_or_else(|| schema(format!("{ptr}/rank"), "explicit lattices need a rank"))?;
                    check_relations(&l.relations, rank, &format!("{ptr}/relations"))?;
                    let action = l.action.as_ref().ok_or_else(|| schema(format!("{ptr}/action"), "explicit lattices need an action"))?;
                    let mut mats = Vec::new();
                    for (name, rows) in action {
                        let aptr = format!("{ptr}/action/{name}");
                        let gi = gen_index(name, &aptr)?;
                        if rows.len() != rank || rows.iter().any(|r| r.len() != rank) {
                            return Err(schema(aptr, format!("expected a {rank}x{rank} matrix")));
                        }
                        mats.push((gi, Mat::from_rows(rows)));
                    }
                    LatticeBody::Explicit { rank, relations: l.relations.clone(), action: mats }
                }
                "divisors" => {
                    let raw_classes = l.classes.as_ref().ok_or_else(|| schema(format!("{ptr}/classes"), "divisor lattices need classes"))?;
                    let mut classes = Vec::new();
                    for (j, c) in raw_classes.iter().enumerate() {
                        let cptr = format!("{ptr}/classes/{j}");
                        let ideal = match (&c.ideal, c.hyperplane) {
                            (Some(gens), false) => {
                                let g =
                                    gens.iter().enumerate().map(|(k, p)| r.poly(p, &format!("{cptr}/ideal/{k}"))).collect::<Result<Vec<_>, _>>()?;
                                if g.iter().any(|p| !p.is_homogeneous()) || g.iter().all(|p| p.is_zero()) {
                                    return Err(schema(format!("{cptr}/ideal"), "ideal generators must be homogeneous and not all zero"));
                                }
                                Some(g)
                            }
                            (None, true) => None,
                            _ => return Err(schema(&cptr, "a class needs either an ideal or \"hyperplane\": true")),
                        };
                        classes.push(DivisorClass { name: c.name.clone(), ideal, degree: c.degree });
                    }
                    check_unique(classes.iter().map(|c| c.name.as_str()), &format!("{ptr}/classes"))?;
                    check_relations(&l.relations, classes.len(), &format!("{ptr}/relations"))?;
                    LatticeBody::Divisors { classes, relations: l.relations.clone() }
                }
                other => return Err(schema(format!("{ptr}/kind"), format!("unknown lattice kind {other:?}"))),
            };
            lattices.push(LatticePresentation { name: l.name.clone(), body });
        }
        check_unique(lattices.iter().map(|l| l.name.as_str()), "/lattices")?;

        let mut subgroup_tests = Vec::new();
        for (i, t) in raw.subgroup_tests.iter().enumerate() {
            let ptr = format!("/subgroup_tests/{i}");
            let gens = gen_list(&t.generators, &format!("{ptr}/generators"))?;
            let lattice = lattices
                .iter()
                .position(|l| l.name == t.lattice)
                .ok_or_else(|| schema(format!("{ptr}/lattice"), format!("unknown lattice {:?}", t.lattice)))?;
            let group = |s: &str, p: &str| s.parse::<FiniteAbelianGroup>().map_err(|e| schema(p, e.to_string()));
            let expected_h1 = group(&t.expected_h1, &format!("{ptr}/expected_h1"))?;
            let expected_dual_h1 = t.expected_dual_h1.as_deref().map(|s| group(s, &format!("{ptr}/expected_dual_h1"))).transpose()?;
            let expected_exceptional_h2 =
                t.expected_exceptional_h2.as_deref().map(|s| group(s, &format!("{ptr}/expected_exceptional_h2"))).transpose()?;
            let exceptional_per_point = match &t.exceptional_per_point {
                Some(v) if v.len() != points.len() => {
                    return Err(schema(format!("{ptr}/exceptional_per_point"), format!("expected {} entries", points.len())))
                }
                Some(v) => v.clone(),
                None => vec![1; points.len()],
            };
            subgroup_tests.push(SubgroupTest {
                name: t.name.clone(),
                generators: gens,
                lattice,
                expected_h1,
                expected_dual_h1,
                exceptional_per_point,
                expected_exceptional_h2,
            });
        }

        let mut projections = Vec::new();
        for (i, p) in raw.projections.iter().enumerate() {
            let ptr = format!("/projections/{i}");
            let point = match (&p.point, p.q_index) {
                (Some(name), None) => point_index(name, &format!("{ptr}/point"))?,
                (None, Some(k)) if (1..=points.len()).contains(&k) => k - 1,
                (None, Some(_)) => return Err(schema(format!("{ptr}/q_index"), format!("index must be in 1..={}", points.len()))),
                _ => return Err(schema(&ptr, "exactly one of \"point\" and \"q_index\" is required")),
            };
            let change = match (p.swap_with, &p.change_images) {
                (None, None) => None,
                (Some(k), None) if (1..=NVARS).contains(&k) => Some(swap_with_first(&r.field, NVARS, k - 1)),
                (Some(_), None) => return Err(schema(format!("{ptr}/swap_with"), format!("coordinate index must be in 1..={NVARS}"))),
                (None, Some(images)) => Some(r.images_matrix(images, &format!("{ptr}/change_images"))?),
                _ => return Err(schema(&ptr, "at most one of \"swap_with\" and \"change_images\" is allowed")),
            };
            let mut components = Vec::new();
            for (j, comp) in p.components.iter().enumerate() {
                let cptr = format!("{ptr}/components/{j}");
                let gens = comp.iter().enumerate().map(|(k, g)| r.poly(g, &format!("{cptr}/{k}"))).collect::<Result<Vec<_>, _>>()?;
                if gens.iter().all(|g| g.is_zero()) {
                    return Err(schema(cptr, "component ideal is zero"));
                }
                if let Some(k) = gens.iter().position(|g| !g.is_homogeneous()) {
                    return Err(schema(format!("{cptr}/{k}"), "generator is not homogeneous"));
                }
                components.push(gens);
            }
            for (j, &q) in p.primes.iter().enumerate() {
                if !crate::numfield::is_prime(q) || q < 5 {
                    return Err(schema(format!("{ptr}/primes/{j}"), format!("{q} is not a prime >= 5")));
                }
            }
            let expected_type = p
                .expected_type
                .as_deref()
                .map(|s| s.parse::<AdeType>().map_err(|e| schema(format!("{ptr}/expected_type"), e.to_string())))
                .transpose()?;
            projections.push(ProjectionClaim {
                point,
                change,
                components,
                primes: p.primes.clone(),
                expected_defect: p.expected_defect,
                expected_type,
                expected_qq_rank: p.expected_qq_rank,
            });
        }

        Ok(Scenario {
            name: raw.name,
            description: raw.description,
            field: r.field,
            cubic,
            points,
            expected_config,
            scan_primes: raw.scan_primes,
            generators,
            groups,
            lattices,
            subgroup_tests,
            projections,
        })
    }

    fn check_generator_text(&self, s: &str, ptr: &str) -> Result<(), ScenarioError> {
        if self.field.degree() == 1 && s.contains('z') {
            return Err(mismatch(ptr, format!("{s:?} uses the generator z, but the field is {}", self.field.label())));
        }
        Ok(())
    }

    fn number(&self, n: &RawNumber, ptr: &str) -> Result<AlgebraicNumber, ScenarioError> {
        match n {
            RawNumber::Int(k) => Ok(AlgebraicNumber::from_int(&self.field, *k)),
            RawNumber::Text(s) => {
                self.check_generator_text(s, ptr)?;
                parse_number(&self.field, s).map_err(|e| schema(ptr, e.to_string()))
            }
            RawNumber::Coeffs(c) => {
                if c.len() != self.field.degree() {
                    return Err(mismatch(ptr, format!("{} coefficients for a field of degree {}", c.len(), self.field.degree())));
                }
                AlgebraicNumber::from_strings(&self.field, c).map_err(|e| schema(ptr, e.to_string()))
            }
        }
    }

    fn poly(&self, p: &RawPoly, ptr: &str) -> Result<MultiPoly, ScenarioError> {
        match p {
            RawPoly::Text(s) => {
                self.check_generator_text(s, ptr)?;
                MultiPoly::parse(&self.field, NVARS, s).map_err(|e| schema(ptr, e.to_string()))
            }
            RawPoly::Terms(terms) => {
                for (i, t) in terms.iter().enumerate() {
                    if t.exp.len() != NVARS {
                        return Err(schema(format!("{ptr}/{i}/exp"), format!("exponent of length {} (expected {NVARS})", t.exp.len())));
                    }
                    if t.coeff.len() != self.field.degree() {
                        return Err(mismatch(
                            format!("{ptr}/{i}/coeff"),
                            format!("{} coefficients for a field of degree {}", t.coeff.len(), self.field.degree()),
                        ));
                    }
                }
                MultiPoly::from_json(&self.field, NVARS, terms).map_err(|e| schema(ptr, e.to_string()))
            }
        }
    }

    fn images_matrix(&self, images: &[RawPoly], ptr: &str) -> Result<FieldMatrix, ScenarioError> {
        if images.len() != NVARS {
            return Err(schema(ptr, format!("expected {NVARS} images")));
        }
        let mut forms = Vec::new();
        for (j, im) in images.iter().enumerate() {
            let iptr = format!("{ptr}/{j}");
            let p = self.poly(im, &iptr)?;
            if p.is_zero() || !p.is_homogeneous() || p.total_degree() != Some(1) {
                return Err(schema(iptr, "image must be a nonzero linear form"));
            }
            forms.push((0..NVARS).map(|i| p.coeff(&Exponent::unit(NVARS, i))).collect());
        }
        Ok(FieldMatrix::from_images(&self.field, &forms))
    }

    fn rows_matrix(&self, rows: &[Vec<RawNumber>], ptr: &str) -> Result<FieldMatrix, ScenarioError> {
        if rows.len() != NVARS || rows.iter().any(|r| r.len() != NVARS) {
            return Err(schema(ptr, format!("expected a {NVARS}x{NVARS} matrix")));
        }
        let rows = rows
            .iter()
            .enumerate()
            .map(|(i, r)| r.iter().enumerate().map(|(j, c)| self.number(c, &format!("{ptr}/{i}/{j}"))).collect::<Result<Vec<_>, _>>())
            .collect::<Result<Vec<_>, _>>()?;
        Ok(FieldMatrix::from_rows(rows))
    }
}

fn check_unique<'a>(names: impl Iterator<Item = &'a str>, ptr: &str) -> Result<(), ScenarioError> {
    let mut seen = BTreeSet::new();
    for n in names {
        if !seen.insert(n) {
            return Err(schema(ptr, format!("duplicate name {n:?}")));
        }
    }
    Ok(())
}

fn check_relations(rel: &[Vec<i64>], n: usize, ptr: &str) -> Result<(), ScenarioError> {
    match rel.iter().position(|r| r.len() != n) {
        Some(i) => Err(schema(format!("{ptr}/{i}"), format!("relation must have {n} entries"))),
        None => Ok(()),
    }
}

// ---------------------------------------------------------------------------
// Bundled catalog

macro_rules! bundled {
    ($($name:literal),* $(,)?) => {
        &[$(($name, include_str!(concat!("../data/scenarios/", $name, ".json")))),*]
    };
}

/// Scenario files shipped with the crate, as `(name, json)` pairs.
pub const BUNDLED: &[(&str, &str)] = bundled!(
    "2a2",
    "2a3_noplane",
    "2a3_plane",
    "2a4",
    "2a5_b0",
    "2a5_b1",
    "2d4_case1",
    "2d4_case2",
    "2d4_case3",
    "2d4_case4",
    "2d4_case5",
    "2d4_case6",
    "3a2",
    "3a2_c6",
    "3a3",
    "3d4",
    "2a2_2a1",
    "2a3_2a1_d2",
    "2d4_2a1",
    "4a2_r0",
    "5a2",
    "2d4_3a1",
    "2a2_4a1",
    "2a3_4a1",
);

pub fn bundled_names() -> Vec<&'static str> {
    BUNDLED.iter().map(|(n, _)| *n).collect()
}

pub fn bundled_scenario(name: &str) -> Option<Result<Scenario, ScenarioError>> {
    let name = name.strip_suffix(".json").unwrap_or(name);
    BUNDLED.iter().find(|(n, _)| *n == name).map(|(_, text)| parse_scenario(text))
}

pub fn bundled_catalog() -> Result<Vec<Scenario>, ScenarioError> {
    BUNDLED.iter().map(|(_, text)| parse_scenario(text)).collect()
}

// ---------------------------------------------------------------------------
// Running

#[derive(Clone, Debug)]
pub struct RunOptions {
    pub truncation: u32,
    pub cap: usize,
    /// Replaces the scenario's scan primes when set.
    pub primes: Option<Vec<u64>>,
    /// Adds a verdict per prime that the field's generator reduces mod `p`.
    pub field_check: bool,
}

impl Default for RunOptions {
    fn default() -> Self {
        RunOptions { truncation: 12, cap: 5000, primes: None, field_check: false }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Verdict {
    pub step: String,
    pub check: String,
    pub expected: String,
    pub computed: String,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GroupRecord {
    pub name: String,
    pub order: usize,
    pub invariants: StructureInvariants,
    /// Permutation of the singular points induced by each generator.
    pub generator_point_actions: Vec<String>,
    pub kernel_order: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct H1Row {
    pub test: String,
    pub lattice: String,
    pub subgroup_order: usize,
    pub rank: usize,
    pub h1: String,
    pub dual_h1: String,
    pub exceptional_h2: String,
    pub expected: String,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DefectRow {
    pub point: String,
    pub q_type: String,
    pub qq_rank: usize,
    pub components: usize,
    pub decomposition: String,
    pub defect: Option<i64>,
    pub expected: i64,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ScenarioReport {
    pub name: String,
    pub field: String,
    pub expected_config: String,
    pub computed_config: Option<String>,
    pub pass: bool,
    pub verdicts: Vec<Verdict>,
    pub classifications: Vec<serde_json::Value>,
    pub groups: Vec<GroupRecord>,
    pub cohomology: Vec<H1Row>,
    pub defects: Vec<DefectRow>,
    pub caveats: Vec<String>,
}

struct Recorder {
    verdicts: Vec<Verdict>,
}

impl Recorder {
    fn push(&mut self, step: &str, check: impl Into<String>, expected: impl ToString, computed: impl ToString, pass: bool) {
        self.verdicts.push(Verdict { step: step.into(), check: check.into(), expected: expected.to_string(), computed: computed.to_string(), pass });
    }

    fn error(&mut self, step: &str, check: impl Into<String>, expected: impl ToString, err: impl std::fmt::Display) {
        self.push(step, check, expected, format!("error: {err}"), false);
    }
}

/// Runs every check of the scenario. Step failures are recorded as failing
/// verdicts and never stop the remaining steps.
pub fn run_scenario(s: &Scenario, opts: &RunOptions) -> ScenarioReport {
    let mut rec = Recorder { verdicts: Vec::new() };
    let mut caveats = Vec::new();

    // singular points and classification
    let mut classifications = Vec::new();
    let mut computed_types = Vec::new();
    for p in &s.points {
        match classify_ade(&s.cubic, &p.point, opts.truncation) {
            Ok(r) => {
                rec.push("classify", format!("type at {} {}", p.name, p.point), p.ade_type, r.ade_type, r.ade_type == p.ade_type);
                computed_types.push(r.ade_type);
                classifications.push(serde_json::json!({"name": p.name, "report": r.to_json()}));
            }
            Err(e) => rec.error("classify", format!("type at {} {}", p.name, p.point), p.ade_type, e),
        }
    }
    let declared = SingConfig::new(s.points.iter().map(|p| p.ade_type));
    rec.push("classify", "declared points match configuration", &s.expected_config, &declared, declared == s.expected_config);
    let computed_config = (computed_types.len() == s.points.len()).then(|| SingConfig::new(computed_types.iter().copied()));
    match &computed_config {
        Some(c) => rec.push("classify", "configuration", &s.expected_config, c, *c == s.expected_config),
        None => rec.push("classify", "configuration", &s.expected_config, "incomplete", false),
    }

    // mod-p scans
    let primes = opts.primes.clone().unwrap_or_else(|| s.scan_primes.clone());
    if primes.len() < 2 {
        caveats.push(format!("singular-point scan uses {} prime(s); two are recommended", primes.len()));
    }
    for &p in &primes {
        if opts.field_check {
            match PrimeField::roots(&s.field, p) {
                Ok(r) => rec.push("field", format!("generator reduces mod {p}"), "at least one root", format!("{} root(s)", r.len()), !r.is_empty()),
                Err(e) => rec.error("field", format!("generator reduces mod {p}"), "at least one root", e),
            }
        }
        let check = format!("singular points over F_{p}");
        let result = PrimeField::new(&s.field, p).map_err(|e| e.to_string()).and_then(|pf| {
            let mut expected: Vec<Vec<u64>> =
                s.points.iter().map(|d| d.point.reduce_mod(&pf)).collect::<Result<_, _>>().map_err(|e| e.to_string())?;
            expected.sort();
            expected.dedup();
            let found = modp_singular_scan_with(&s.cubic, &pf).map_err(|e| e.to_string())?;
            Ok((expected, found))
        });
        match result {
            Ok((expected, found)) => {
                let pass = expected == found && expected.len() == s.points.len();
                rec.push(
                    "scan",
                    check,
                    format!("{} declared points", s.points.len()),
                    format!("{} points, match={}", found.len(), expected == found),
                    pass,
                );
            }
            Err(e) => rec.error("scan", check, format!("{} declared points", s.points.len()), e),
        }
    }

    // automorphisms
    for g in &s.generators {
        match invariance_scalar(&g.matrix, &s.cubic) {
            Ok(l) => rec.push("automorphisms", format!("{} preserves the cubic", g.name), "scalar multiple", format!("factor {l}"), true),
            Err(e) => rec.error("automorphisms", format!("{} preserves the cubic", g.name), "scalar multiple", e),
        }
    }
    let mut groups = Vec::new();
    for gc in &s.groups {
        let step = "groups";
        let grp = match closure_of(s, &gc.generators, opts.cap) {
            Ok(g) => g,
            Err(e) => {
                rec.error(step, format!("closure of {}", gc.name), gc.expected.order, e);
                continue;
            }
        };
        let inv = structure_invariants(&grp);
        let bad = gc.expected.mismatches(&inv);
        rec.push(step, format!("structure of {}", gc.name), describe_expected(&gc.expected), describe_invariants(&inv), bad.is_empty());
        let pts: Vec<ProjPoint> = s.points.iter().map(|p| p.point.clone()).collect();
        match singular_point_action(&grp, &pts) {
            Ok((perms, kernel)) => {
                if let Some(k) = gc.kernel_order {
                    rec.push(step, format!("kernel of {} on singular points", gc.name), k, kernel.len(), k == kernel.len());
                }
                let orbits = orbits_of(&perms, pts.len());
                if let Some(exp) = &gc.point_orbits {
                    let norm = |o: &Vec<Vec<usize>>| -> BTreeSet<BTreeSet<usize>> { o.iter().map(|v| v.iter().copied().collect()).collect() };
                    let fmt_orbits = |o: &BTreeSet<BTreeSet<usize>>| -> String {
                        o.iter()
                            .map(|v| format!("{{{}}}", v.iter().map(|&i| s.points[i].name.as_str()).collect::<Vec<_>>().join(",")))
                            .collect::<Vec<_>>()
                            .join(" ")
                    };
                    let (e, c) = (norm(exp), norm(&orbits));
                    rec.push(step, format!("orbits of {} on singular points", gc.name), fmt_orbits(&e), fmt_orbits(&c), e == c);
                }
                let generator_point_actions = gc
                    .generators
                    .iter()
                    .map(|&gi| {
                        let idx = grp.index_of(&ProjMatrix::new(s.generators[gi].matrix.clone()).unwrap()).unwrap();
                        format!("{}: {}", s.generators[gi].name, perms[idx].cycle_string())
                    })
                    .collect();
                groups.push(GroupRecord {
                    name: gc.name.clone(),
                    order: grp.order(),
                    invariants: inv,
                    generator_point_actions,
                    kernel_order: kernel.len(),
                });
            }
            Err(e) => rec.error(step, format!("action of {} on singular points", gc.name), "permutation", e),
        }
    }

    // cohomology
    let mut cohomology = Vec::new();
    for t in &s.subgroup_tests {
        match run_subgroup_test(s, t, opts) {
            Ok((row, notes)) => {
                let step = "cohomology";
                rec.push(step, format!("H1 for {} on {}", t.name, row.lattice), &t.expected_h1, &row.h1, row.h1 == t.expected_h1.to_string());
                if let Some(d) = &t.expected_dual_h1 {
                    rec.push(step, format!("dual H1 for {} on {}", t.name, row.lattice), d, &row.dual_h1, row.dual_h1 == d.to_string());
                }
                if let Some(d) = &t.expected_exceptional_h2 {
                    rec.push(step, format!("H2 of exceptional divisors for {}", t.name), d, &row.exceptional_h2, row.exceptional_h2 == d.to_string());
                }
                caveats.extend(notes);
                cohomology.push(row);
            }
            Err(e) => {
                rec.error("cohomology", format!("H1 for {}", t.name), &t.expected_h1, &e);
                cohomology.push(H1Row {
                    test: t.name.clone(),
                    lattice: s.lattices[t.lattice].name.clone(),
                    subgroup_order: 0,
                    rank: 0,
                    h1: format!("error: {e}"),
                    dual_h1: String::new(),
                    exceptional_h2: String::new(),
                    expected: t.expected_h1.to_string(),
                    pass: false,
                });
            }
        }
    }

    // projection and defect
    let mut defects = Vec::new();
    for c in &s.projections {
        let step = "projection";
        let dp = &s.points[c.point];
        let mut row = DefectRow {
            point: dp.name.clone(),
            q_type: String::new(),
            qq_rank: 0,
            components: c.components.len(),
            decomposition: String::new(),
            defect: None,
            expected: c.expected_defect,
            pass: false,
        };
        let change = c.change.clone().or_else(|| auto_change(&dp.point));
        let pd = match extract_projection(&s.cubic, &dp.point, change.as_ref(), opts.truncation) {
            Ok(pd) => pd,
            Err(e) => {
                rec.error(step, format!("projection from {}", dp.name), c.expected_defect, e);
                row.decomposition = "not run".into();
                defects.push(row);
                continue;
            }
        };
        row.q_type = pd.q_type.to_string();
        let exp_type = c.expected_type.unwrap_or(dp.ade_type);
        rec.push(step, format!("type at {} after moving it to [1:0:0:0:0]", dp.name), exp_type, pd.q_type, pd.q_type == exp_type);
        row.qq_rank = qq_rank(&pd.f2);
        if let Some(r) = c.expected_qq_rank {
            rec.push(step, format!("rank of the tangent quadric at {}", dp.name), r, row.qq_rank, r == row.qq_rank);
        }
        let mut decomposition_ok = false;
        match verify_decomposition(&pd, &c.components, &c.primes) {
            Ok(v) => {
                row.decomposition = format!("{:?}", v.status);
                decomposition_ok = v.status == DecompositionStatus::Verified;
                let detail = if v.failures.is_empty() {
                    v.primes.iter().map(|pc| format!("F_{}: {} points", pc.p, pc.curve_points)).collect::<Vec<_>>().join(", ")
                } else {
                    v.failures.join("; ")
                };
                rec.push(
                    step,
                    format!("{} claimed components of C_q at {}", c.components.len(), dp.name),
                    "Verified",
                    format!("{:?} ({detail})", v.status),
                    decomposition_ok,
                );
                if v.single_prime_caveat {
                    caveats.push(format!("covering check at {} used a single prime", dp.name));
                }
            }
            Err(e) => {
                row.decomposition = format!("error: {e}");
                rec.error(step, format!("claimed components of C_q at {}", dp.name), "Verified", e);
            }
        }
        match defect_from_components(pd.q_type, c.components.len()) {
            Ok(d) => {
                row.defect = Some(d);
                row.pass = decomposition_ok && d == c.expected_defect;
                rec.push(step, format!("defect from {}", dp.name), c.expected_defect, d, d == c.expected_defect);
            }
            Err(e) => rec.error(step, format!("defect from {}", dp.name), c.expected_defect, e),
        }
        defects.push(row);
    }

    let pass = rec.verdicts.iter().all(|v| v.pass);
    ScenarioReport {
        name: s.name.clone(),
        field: s.field.label().to_string(),
        expected_config: s.expected_config.to_string(),
        computed_config: computed_config.map(|c| c.to_string()),
        pass,
        verdicts: rec.verdicts,
        classifications,
        groups,
        cohomology,
        defects,
        caveats,
    }
}

fn closure_of(s: &Scenario, gens: &[usize], cap: usize) -> Result<FiniteMatrixGroup, String> {
    let mats = gens.iter().map(|&g| ProjMatrix::new(s.generators[g].matrix.clone()).map_err(|e| e.to_string())).collect::<Result<Vec<_>, _>>()?;
    group_closure(&mats, cap).map_err(|e| e.to_string())
}

fn auto_change(q: &ProjPoint) -> Option<FieldMatrix> {
    let field = q.coords()[0].field().clone();
    let n = q.coords().len();
    if *q == ProjPoint::coordinate(&field, n, 0) {
        return None;
    }
    match (0..n).find(|&i| *q == ProjPoint::coordinate(&field, n, i)) {
        Some(i) => Some(swap_with_first(&field, n, i)),
        None => Some(move_to_origin(q)),
    }
}

fn orbits_of(perms: &[crate::autgroups::Perm], n: usize) -> Vec<Vec<usize>> {
    let mut seen = vec![false; n];
    let mut out = Vec::new();
    for i in 0..n {
        if seen[i] {
            continue;
        }
        let orbit: BTreeSet<usize> = perms.iter().map(|p| p.0[i]).collect();
        for &j in &orbit {
            seen[j] = true;
        }
        out.push(orbit.into_iter().collect());
    }
    out
}

fn describe_expected(e: &ExpectedStructure) -> String {
    let mut s = format!("order {}", e.order);
    if let Some(a) = e.abelian {
        write!(s, ", abelian={a}").unwrap();
    }
    if let Some(a) = &e.abelian_invariants {
        write!(s, ", ab={a:?}").unwrap();
    }
    if let Some(c) = e.center_order {
        write!(s, ", |Z|={c}").unwrap();
    }
    if let Some(c) = e.derived_order {
        write!(s, ", |G'|={c}").unwrap();
    }
    if let Some(c) = e.class_count {
        write!(s, ", classes={c}").unwrap();
    }
    if let Some(c) = &e.element_orders {
        write!(s, ", orders={c:?}").unwrap();
    }
    s
}

fn describe_invariants(s: &StructureInvariants) -> String {
    format!(
        "order {}, abelian={}, ab={:?}, |Z|={}, |G'|={}, classes={}, orders={:?}",
        s.order, s.abelian, s.abelian_invariants, s.center_order, s.derived_order, s.class_count, s.element_orders
    )
}

/// Lattice with the action of the subgroup generated by `gens`, plus notes
/// on how divisor images were identified.
pub fn subgroup_lattice(s: &Scenario, lattice: usize, gens: &[usize], cap: usize) -> Result<(GLattice, FiniteMatrixGroup, Vec<String>), String> {
    let grp = closure_of(s, gens, cap)?;
    let fg = FinGroup::from_matrix_group(&grp);
    let element = |gi: usize| grp.index_of(&ProjMatrix::new(s.generators[gi].matrix.clone()).unwrap()).unwrap();
    let lat = &s.lattices[lattice];
    let mut notes = Vec::new();
    let m = match &lat.body {
        LatticeBody::Explicit { rank, relations, action } => {
            let mut mats = Vec::new();
            for &gi in gens {
                let (_, a) = action
                    .iter()
                    .find(|(g, _)| *g == gi)
                    .ok_or_else(|| format!("lattice {} has no matrix for generator {}", lat.name, s.generators[gi].name))?;
                mats.push((element(gi), a.clone()));
            }
            let ambient = if *rank == 0 { GLattice::trivial(fg, 0) } else { GLattice::from_generators(fg, &mats).map_err(|e| e.to_string())? };
            quotient_lattice(&FPLattice { ambient, relations: relations.clone() }).map_err(|e| e.to_string())?.lattice
        }
        LatticeBody::Divisors { classes, relations } => {
            let n = classes.len();
            let q = quotient_lattice(&FPLattice { ambient: GLattice::trivial(FinGroup::cyclic(1), n), relations: relations.clone() })
                .map_err(|e| e.to_string())?;
            let mut mats = Vec::new();
            for &gi in gens {
                let a = derived_action(classes, &q.projection, &s.generators[gi], &mut notes)?;
                for r in relations {
                    if q.projection.apply(&a.apply(r)).iter().any(|&x| x != 0) {
                        return Err(format!("{} does not preserve the relations of {}", s.generators[gi].name, lat.name));
                    }
                }
                mats.push((element(gi), q.projection.mul(&a.mul(&q.lift))));
            }
            GLattice::from_generators(fg, &mats).map_err(|e| e.to_string())?
        }
    };
    Ok((m, grp, notes))
}

/// Integer matrix of `g_*` on the ambient lattice of divisor classes.
/// An image surface is identified with a listed class when the ideals agree;
/// otherwise, if it shares a quadric with a listed class `D` and the degrees
/// add up to 6, the two are linked on the cubic and the image is `2H - D`.
fn derived_action(classes: &[DivisorClass], projection: &Mat<i64>, g: &NamedGenerator, notes: &mut Vec<String>) -> Result<Mat<i64>, String> {
    let n = classes.len();
    let minv = g.matrix.inverse().ok_or("singular generator")?;
    let hyper = classes.iter().position(|c| c.ideal.is_none());
    let mut a = Mat::<i64>::zeros(n, n);
    for (j, c) in classes.iter().enumerate() {
        let Some(ideal) = &c.ideal else {
            a[(j, j)] = 1;
            continue;
        };
        let image: Vec<MultiPoly> = ideal.iter().map(|p| p.substitute(&minv)).collect::<Result<_, _>>().map_err(|e| e.to_string())?;
        let mut exact = None;
        for (k, d) in classes.iter().enumerate() {
            if let Some(ik) = &d.ideal {
                if same_ideal(&image, ik).map_err(|e| e.to_string())? {
                    exact = Some(k);
                    break;
                }
            }
        }
        if let Some(k) = exact {
            a[(k, j)] = 1;
            continue;
        }
        let h = hyper.ok_or_else(|| format!("image of {} under {} is not a listed class and there is no hyperplane class", c.name, g.name))?;
        let mut candidates: Vec<(usize, Vec<i64>)> = Vec::new();
        for (k, d) in classes.iter().enumerate() {
            let Some(ik) = &d.ideal else { continue };
            if d.degree + c.degree != 6 {
                continue;
            }
            if graded_intersection_dim(&image, ik, 2, NVARS).map_err(|e| e.to_string())? > 0 {
                let mut v = vec![0i64; n];
                v[h] += 2;
                v[k] -= 1;
                candidates.push((k, v));
            }
        }
        let Some((k0, v0)) = candidates.first().cloned() else {
            return Err(format!("image of {} under {} matches no listed class", c.name, g.name));
        };
        for (k, v) in &candidates[1..] {
            let diff: Vec<i64> = v.iter().zip(&v0).map(|(x, y)| x - y).collect();
            if projection.apply(&diff).iter().any(|&x| x != 0) {
                return Err(format!(
                    "image of {} under {} is linked to both {} and {} with different classes",
                    c.name, g.name, classes[k0].name, classes[*k].name
                ));
            }
        }
        notes.push(format!("{}({}) identified as 2{} - {} via a common quadric", g.name, c.name, classes[h].name, classes[k0].name));
        for (i, x) in v0.iter().enumerate() {
            a[(i, j)] = *x;
        }
    }
    Ok(a)
}

fn run_subgroup_test(s: &Scenario, t: &SubgroupTest, opts: &RunOptions) -> Result<(H1Row, Vec<String>), String> {
    let (m, grp, notes) = subgroup_lattice(s, t.lattice, &t.generators, opts.cap)?;
    let h1v = h1(&m).map_err(|e| e.to_string())?;
    let dual = h1(&dual_lattice(&m)).map_err(|e| e.to_string())?;
    let pts: Vec<ProjPoint> = s.points.iter().map(|p| p.point.clone()).collect();
    let exc = exceptional_module(&grp, &pts, &t.exceptional_per_point).and_then(|e| h2(&e).map_err(|e| e.to_string()));
    let exceptional_h2 = match exc {
        Ok(g) => g.to_string(),
        Err(e) => format!("error: {e}"),
    };
    let mut pass = h1v == t.expected_h1;
    pass &= t.expected_dual_h1.as_ref().is_none_or(|d| *d == dual);
    pass &= t.expected_exceptional_h2.as_ref().is_none_or(|d| d.to_string() == exceptional_h2);
    Ok((
        H1Row {
            test: t.name.clone(),
            lattice: s.lattices[t.lattice].name.clone(),
            subgroup_order: grp.order(),
            rank: m.rank(),
            h1: h1v.to_string(),
            dual_h1: dual.to_string(),
            exceptional_h2,
            expected: t.expected_h1.to_string(),
            pass,
        },
        notes,
    ))
}

/// Permutation module on the exceptional divisors: `counts[i]` divisors over
/// point `i`, moved blockwise with the points.
pub fn exceptional_module(grp: &FiniteMatrixGroup, pts: &[ProjPoint], counts: &[u32]) -> Result<GLattice, String> {
    let (perms, _) = singular_point_action(grp, pts).map_err(|e| e.to_string())?;
    let offsets: Vec<usize> = counts
        .iter()
        .scan(0usize, |acc, &c| {
            let o = *acc;
            *acc += c as usize;
            Some(o)
        })
        .collect();
    let total: usize = counts.iter().map(|&c| c as usize).sum();
    let mut big = Vec::with_capacity(perms.len());
    for p in &perms {
        let mut img = vec![0usize; total];
        for (i, &j) in p.0.iter().enumerate() {
            if counts[i] != counts[j] {
                return Err(format!("points {} and {} have different numbers of exceptional divisors", i + 1, j + 1));
            }
            for t in 0..counts[i] as usize {
                img[offsets[i] + t] = offsets[j] + t;
            }
        }
        big.push(img);
    }
    permutation_module(FinGroup::from_matrix_group(grp), &big).map_err(|e| e.to_string())
}

// ---------------------------------------------------------------------------
// Reports

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ReportFormat {
    Markdown,
    Json,
}

#[derive(Serialize)]
struct JsonSummary<'a> {
    schema_version: u32,
    scenarios: usize,
    passed: usize,
    failed: Vec<&'a str>,
    reports: &'a [ScenarioReport],
}

pub fn emit_report(reports: &[ScenarioReport], format: ReportFormat) -> String {
    match format {
        ReportFormat::Json => {
            let summary = JsonSummary {
                schema_version: SCHEMA_VERSION,
                scenarios: reports.len(),
                passed: reports.iter().filter(|r| r.pass).count(),
                failed: reports.iter().filter(|r| !r.pass).map(|r| r.name.as_str()).collect(),
                reports,
            };
            let mut s = serde_json::to_string_pretty(&summary).unwrap();
            s.push('\n');
            s
        }
        ReportFormat::Markdown => markdown(reports),
    }
}

pub fn write_report(reports: &[ScenarioReport], format: ReportFormat, path: &Path) -> std::io::Result<()> {
    std::fs::write(path, emit_report(reports, format))
}

fn markdown(reports: &[ScenarioReport]) -> String {
    let mut s = String::new();
    let ok = |b: bool| if b { "pass" } else { "FAIL" };
    writeln!(s, "# Scenario report\n").unwrap();
    writeln!(s, "{} scenario(s), {} passed.\n", reports.len(), reports.iter().filter(|r| r.pass).count()).unwrap();
    writeln!(s, "| scenario | field | configuration | computed | checks | status |").unwrap();
    writeln!(s, "|---|---|---|---|---|---|").unwrap();
    for r in reports {
        let passed = r.verdicts.iter().filter(|v| v.pass).count();
        writeln!(
            s,
            "| {} | {} | {} | {} | {}/{} | {} |",
            r.name,
            r.field,
            r.expected_config,
            r.computed_config.as_deref().unwrap_or("-"),
            passed,
            r.verdicts.len(),
            ok(r.pass)
        )
        .unwrap();
    }
    writeln!(s, "\n## Defect\n").unwrap();
    writeln!(s, "| scenario | configuration | point | type | rank Q_q | components | decomposition | defect | expected | status |").unwrap();
    writeln!(s, "|---|---|---|---|---|---|---|---|---|---|").unwrap();
    for r in reports {
        for d in &r.defects {
            writeln!(
                s,
                "| {} | {} | {} | {} | {} | {} | {} | {} | {} | {} |",
                r.name,
                r.expected_config,
                d.point,
                d.q_type,
                d.qq_rank,
                d.components,
                d.decomposition,
                d.defect.map_or("-".to_string(), |x| x.to_string()),
                d.expected,
                ok(d.pass)
            )
            .unwrap();
        }
    }
    writeln!(s, "\n## H1 obstructions\n").unwrap();
    writeln!(s, "| scenario | configuration | subgroup | order | lattice | rank | H1 | dual H1 | H2 exceptional | expected | status |").unwrap();
    writeln!(s, "|---|---|---|---|---|---|---|---|---|---|---|").unwrap();
    for r in reports {
        for h in &r.cohomology {
            writeln!(
                s,
                "| {} | {} | {} | {} | {} | {} | {} | {} | {} | {} | {} |",
                r.name,
                r.expected_config,
                h.test,
                h.subgroup_order,
                h.lattice,
                h.rank,
                h.h1,
                h.dual_h1,
                h.exceptional_h2,
                h.expected,
                ok(h.pass)
            )
            .unwrap();
        }
    }
    let failures: Vec<(&str, &Verdict)> =
        reports.iter().flat_map(|r| r.verdicts.iter().filter(|v| !v.pass).map(move |v| (r.name.as_str(), v))).collect();
    if !failures.is_empty() {
        writeln!(s, "\n## Failures\n").unwrap();
        for (name, v) in failures {
            writeln!(s, "- {name} / {}: {}: expected {}, computed {}", v.step, v.check, v.expected, v.computed).unwrap();
        }
    }
    let caveats: Vec<(&str, &String)> = reports.iter().flat_map(|r| r.caveats.iter().map(move |c| (r.name.as_str(), c))).collect();
    if !caveats.is_empty() {
        writeln!(s, "\n## Notes\n").unwrap();
        for (name, c) in caveats {
            writeln!(s, "- {name}: {c}").unwrap();
        }
    }
    s
}
