//! Deterministic synthetic traces for the HR Portal component design.
//!
//! Each use case is a call-chain template: a tree of frames running from a
//! JSP page through servlets, remote-bean stubs and wrappers, stateless
//! beans and DAOs down to `BaseDAO.getConnection()`. [`simulate`] expands
//! executions of those templates into balanced enter/exit events with
//! self-durations drawn from a [`LatencyModel`].
//!
//! Durations come from a counter-based generator: ChaCha8 keyed by the seed,
//! with the stream selected by (use case, execution index) and the word
//! position by the frame index. Output bytes therefore depend only on the
//! spec, never on generation order.

use std::collections::BTreeMap;

use indexmap::IndexMap;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::trace_model::{EventKind, MethodName};

pub const REGISTER: &str = "register";
pub const LOGIN: &str = "login";
pub const ADD_INTERVIEW_RESULT: &str = "add_interview_result";
pub const RECRUIT: &str = "recruit";
pub const VIEW_RESULT: &str = "view_result";

/// Use cases in their canonical execution order.
pub const USE_CASES: [&str; 5] = [REGISTER, LOGIN, ADD_INTERVIEW_RESULT, RECRUIT, VIEW_RESULT];

const REQ_RESP: &str =
    "(javax.servlet.http.HttpServletRequest,javax.servlet.http.HttpServletResponse)";

/// Fully qualified method names used by the HR Portal templates.
pub mod methods {
    pub const GET_CONNECTION: &str = "com.mycompany.hr.dao.BaseDAO.getConnection()";
    pub const BASE_DAO_INIT: &str = "com.mycompany.hr.dao.BaseDAO.<init>()";
    pub const EMPLOYEE_DAO_INIT: &str = "com.mycompany.hr.dao.EmployeeDAO.<init>()";
    pub const DAO_ADD_CANDIDATE_PROFILE: &str =
        "com.mycompany.hr.dao.EmployeeDAO.addCandidateProfile(com.mycompany.hr.vo.CandidateProfile)";
    pub const DAO_ADD_EMPLOYEE_CREDENTIALS: &str =
        "com.mycompany.hr.dao.EmployeeDAO.addEmployeeCredentials(com.mycompany.hr.vo.EmployeeCredentials)";
    pub const DAO_AUTHENTICATE_EMPLOYEE: &str =
        "com.mycompany.hr.dao.EmployeeDAO.authenticateEmployee(com.mycompany.hr.vo.EmployeeCredentials)";
    pub const INTERVIEW_DAO_INIT: &str = "com.mycompany.hr.dao.InterviewDAO.<init>()";
    pub const INTERVIEW_DAO_ADD: &str =
        "com.mycompany.hr.dao.InterviewDAO.addInterviewResult(com.mycompany.hr.vo.InterviewResult)";
    pub const INTERVIEW_DAO_GET: &str =
        "com.mycompany.hr.dao.InterviewDAO.getInterviewResults(java.lang.String)";
    pub const HR_DAO_INIT: &str = "com.mycompany.hr.dao.HRDAO.<init>()";
    pub const HR_DAO_RECRUIT: &str =
        "com.mycompany.hr.dao.HRDAO.recruitEmployee(com.mycompany.hr.vo.EmployeeProfile)";

    pub const STUB_ADD_CANDIDATE_PROFILE: &str = "com.mycompany.hr.process._EmployeeBeanRemoteRemote_DynamicStub.addCandidateProfile(com.mycompany.hr.vo.CandidateProfile)";
    pub const STUB_ADD_EMPLOYEE_CREDENTIALS: &str = "com.mycompany.hr.process._EmployeeBeanRemoteRemote_DynamicStub.addEmployeeCredentials(com.mycompany.hr.vo.EmployeeCredentials)";
    pub const STUB_AUTHENTICATE: &str = "com.mycompany.hr.process._EmployeeBeanRemoteRemote_DynamicStub.authenticate(com.mycompany.hr.vo.EmployeeCredentials)";
    pub const WRAPPER_ADD_CANDIDATE_PROFILE: &str = "com.mycompany.hr.process._EmployeeBeanRemoteRemoteWrapper.addCandidateProfile(com.mycompany.hr.vo.CandidateProfile)";
    pub const WRAPPER_ADD_EMPLOYEE_CREDENTIALS: &str = "com.mycompany.hr.process._EmployeeBeanRemoteRemoteWrapper.addEmployeeCredentials(com.mycompany.hr.vo.EmployeeCredentials)";
    pub const WRAPPER_AUTHENTICATE: &str = "com.mycompany.hr.process._EmployeeBeanRemoteRemoteWrapper.authenticate(com.mycompany.hr.vo.EmployeeCredentials)";

    pub const BEAN_ADD_CANDIDATE_PROFILE: &str =
        "com.mycompany.hr.process.EmployeeBeanBean.addCandidateProfile(com.mycompany.hr.vo.CandidateProfile)";
    pub const BEAN_ADD_CREDENTIALS: &str =
        "com.mycompany.hr.process.EmployeeBeanBean.addCredentials(com.mycompany.hr.vo.EmployeeCredentials)";
    pub const BEAN_AUTHENTICATE: &str =
        "com.mycompany.hr.process.EmployeeBeanBean.authenticate(com.mycompany.hr.vo.EmployeeCredentials)";
    pub const BEAN_ADD_INTERVIEW_RESULTS: &str =
        "com.mycompany.hr.process.InterviewResultsBean.addInterviewResults(com.mycompany.hr.vo.InterviewResult)";
    pub const BEAN_VIEW_INTERVIEW_RESULTS: &str =
        "com.mycompany.hr.process.InterviewResultsBean.viewInterviewResults(java.lang.String)";
    pub const BEAN_RECRUIT: &str =
        "com.mycompany.hr.process.HRProcessBean.recruit(com.mycompany.hr.vo.EmployeeProfile)";

    pub const CANDIDATE_PROFILE_INIT: &str = "com.mycompany.hr.vo.CandidateProfile.<init>()";
    pub const EMPLOYEE_CREDENTIALS_INIT: &str = "com.mycompany.hr.vo.EmployeeCredentials.<init>()";
    pub const INTERVIEW_RESULT_INIT: &str = "com.mycompany.hr.vo.InterviewResult.<init>()";
    pub const EMPLOYEE_PROFILE_INIT: &str = "com.mycompany.hr.vo.EmployeeProfile.<init>()";
}

fn page(class: &str) -> String {
    format!("org.apache.jsp.{class}._jspService{REQ_RESP}")
}

fn servlet(fqcn: &str, method: &str) -> String {
    format!("{fqcn}.{method}{REQ_RESP}")
}

pub fn login_jsp() -> String {
    page("Login_jsp")
}

pub fn register_jsp() -> String {
    page("Register_jsp")
}

pub fn registration_servlet() -> String {
    servlet(
        "com.mycompany.hr.servlet.RegistrationServlet",
        "processRequest",
    )
}

pub fn login_servlet_do_post() -> String {
    servlet("com.mycompany.hr.servlet.LoginServlet", "doPost")
}

pub fn login_servlet_process_request() -> String {
    servlet("org.apache.jsp.LoginServlet", "processRequest")
}

/// One frame of a call-chain template and the frames it calls, in order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Frame {
    pub method: MethodName,
    pub children: Vec<Frame>,
}

impl Frame {
    fn new(method: impl AsRef<str>, children: Vec<Frame>) -> Self {
        Frame {
            method: MethodName::new(method.as_ref()).expect("template names are valid"),
            children,
        }
    }

    fn leaf(method: impl AsRef<str>) -> Self {
        Frame::new(method, Vec::new())
    }

    /// Pre-order frame list.
    pub fn preorder(&self) -> Vec<&Frame> {
        let mut out = vec![self];
        for child in &self.children {
            out.extend(child.preorder());
        }
        out
    }

    /// How many frames of the template have this method.
    pub fn count(&self, method: &str) -> usize {
        self.preorder()
            .iter()
            .filter(|f| f.method.as_str() == method)
            .count()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CallChain {
    pub name: String,
    pub root: Frame,
}

impl CallChain {
    pub fn frame_count(&self) -> usize {
        self.root.preorder().len()
    }
}

/// `XDAO.<init>` (which runs `BaseDAO.<init>`) followed by a DAO operation
/// that opens a connection.
fn dao_access(init: &str, operation: &str) -> Vec<Frame> {
    use methods::*;
    vec![
        Frame::new(init, vec![Frame::leaf(BASE_DAO_INIT)]),
        Frame::new(operation, vec![Frame::leaf(GET_CONNECTION)]),
    ]
}

fn remote_call(stub: &str, wrapper: &str, bean: &str, bean_body: Vec<Frame>) -> Frame {
    Frame::new(
        stub,
        vec![Frame::new(wrapper, vec![Frame::new(bean, bean_body)])],
    )
}

/// The five HR Portal use cases, keyed by use-case name in canonical order.
pub fn hr_scenarios() -> IndexMap<String, CallChain> {
    use methods::*;

    let register = Frame::new(
        register_jsp(),
        vec![Frame::new(
            registration_servlet(),
            vec![
                Frame::leaf(CANDIDATE_PROFILE_INIT),
                remote_call(
                    STUB_ADD_CANDIDATE_PROFILE,
                    WRAPPER_ADD_CANDIDATE_PROFILE,
                    BEAN_ADD_CANDIDATE_PROFILE,
                    [
                        vec![Frame::leaf(CANDIDATE_PROFILE_INIT)],
                        dao_access(EMPLOYEE_DAO_INIT, DAO_ADD_CANDIDATE_PROFILE),
                    ]
                    .concat(),
                ),
                Frame::leaf(EMPLOYEE_CREDENTIALS_INIT),
                remote_call(
                    STUB_ADD_EMPLOYEE_CREDENTIALS,
                    WRAPPER_ADD_EMPLOYEE_CREDENTIALS,
                    BEAN_ADD_CREDENTIALS,
                    [
                        vec![Frame::leaf(EMPLOYEE_CREDENTIALS_INIT)],
                        dao_access(EMPLOYEE_DAO_INIT, DAO_ADD_EMPLOYEE_CREDENTIALS),
                    ]
                    .concat(),
                ),
            ],
        )],
    );

    let login = Frame::new(
        login_jsp(),
        vec![Frame::new(
            login_servlet_do_post(),
            vec![Frame::new(
                login_servlet_process_request(),
                vec![
                    Frame::leaf(EMPLOYEE_CREDENTIALS_INIT),
                    remote_call(
                        STUB_AUTHENTICATE,
                        WRAPPER_AUTHENTICATE,
                        BEAN_AUTHENTICATE,
                        [
                            vec![Frame::leaf(EMPLOYEE_CREDENTIALS_INIT)],
                            dao_access(EMPLOYEE_DAO_INIT, DAO_AUTHENTICATE_EMPLOYEE),
                        ]
                        .concat(),
                    ),
                ],
            )],
        )],
    );

    let add_interview_result = Frame::new(
        page("InterviewInfoPage_jsp"),
        vec![Frame::new(
            servlet(
                "com.mycompany.hr.servlet.InterviewResultServlet",
                "processRequest",
            ),
            vec![
                Frame::leaf(INTERVIEW_RESULT_INIT),
                Frame::new(
                    BEAN_ADD_INTERVIEW_RESULTS,
                    dao_access(INTERVIEW_DAO_INIT, INTERVIEW_DAO_ADD),
                ),
            ],
        )],
    );

    let recruit = Frame::new(
        page("recruitmentPage_jsp"),
        vec![Frame::new(
            servlet("com.mycompany.hr.servlet.HRProcessServlet", "doGet"),
            vec![Frame::new(
                servlet(
                    "com.mycompany.hr.process.HRProcessServlet",
                    "processRequest",
                ),
                vec![
                    Frame::leaf(EMPLOYEE_PROFILE_INIT),
                    Frame::new(BEAN_RECRUIT, dao_access(HR_DAO_INIT, HR_DAO_RECRUIT)),
                ],
            )],
        )],
    );

    let view_result = Frame::new(
        page("ViewResult_jsp"),
        vec![Frame::new(
            BEAN_VIEW_INTERVIEW_RESULTS,
            dao_access(INTERVIEW_DAO_INIT, INTERVIEW_DAO_GET),
        )],
    );

    [
        (REGISTER, register),
        (LOGIN, login),
        (ADD_INTERVIEW_RESULT, add_interview_result),
        (RECRUIT, recruit),
        (VIEW_RESULT, view_result),
    ]
    .into_iter()
    .map(|(name, root)| {
        (
            name.to_string(),
            CallChain {
                name: name.to_string(),
                root,
            },
        )
    })
    .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LatencyModel {
    /// Base self-duration per method, in nanoseconds.
    pub base_ns: BTreeMap<MethodName, u64>,
    /// Half-width of the uniform multiplier `1 ± jitter`; in `[0, 1)`.
    pub jitter: f64,
    pub default_base_ns: u64,
}

impl Default for LatencyModel {
    fn default() -> Self {
        LatencyModel {
            base_ns: BTreeMap::new(),
            jitter: 0.0,
            default_base_ns: 50_000,
        }
    }
}

impl LatencyModel {
    pub fn base(&self, method: &MethodName) -> u64 {
        self.base_ns
            .get(method)
            .copied()
            .unwrap_or(self.default_base_ns)
    }

    /// Realized self-duration for a uniform draw `u` in `[0, 1)`.
    pub fn realize(&self, method: &MethodName, u: f64) -> u64 {
        let base = self.base(method);
        if self.jitter == 0.0 {
            return base;
        }
        let factor = 1.0 + self.jitter * (2.0 * u - 1.0);
        (base as f64 * factor).round().max(0.0) as u64
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WorkloadSpec {
    /// Executions per use case.
    pub executions: BTreeMap<String, u64>,
    pub seed: u64,
    pub latency: LatencyModel,
    pub thread_count: u32,
}

impl WorkloadSpec {
    pub fn validate(&self) -> Result<()> {
        for name in self.executions.keys() {
            if !USE_CASES.contains(&name.as_str()) {
                return Err(Error::UnknownUseCase(name.clone()));
            }
        }
        if self.thread_count == 0 {
            return Err(Error::Workload("thread_count must be at least 1".into()));
        }
        if !(0.0..1.0).contains(&self.latency.jitter) {
            return Err(Error::Workload(format!(
                "jitter {} outside [0, 1)",
                self.latency.jitter
            )));
        }
        Ok(())
    }

    pub fn count(&self, use_case: &str) -> u64 {
        self.executions.get(use_case).copied().unwrap_or(0)
    }
}

const MS: u64 = 1_000_000;

/// Per-invocation base self-durations reproducing the hot-spot table of the
/// 20-user "log in" snapshot: each row's total self time divided by its
/// invocation count.
fn figure8_latency() -> LatencyModel {
    use methods::*;
    // (method, total self ns in the reference table, invocations there).
    // Rows for pages the preset never visits are folded into the register
    // chain below.
    let rows: Vec<(String, u64, u64)> = vec![
        (GET_CONNECTION.into(), 1267 * MS, 50),
        (DAO_ADD_CANDIDATE_PROFILE.into(), 946 * MS, 20),
        (DAO_ADD_EMPLOYEE_CREDENTIALS.into(), 624 * MS, 20),
        (DAO_AUTHENTICATE_EMPLOYEE.into(), 85_800_000, 10),
        (login_jsp(), 54_600_000, 20),
        (STUB_ADD_CANDIDATE_PROFILE.into(), 30_800_000, 20),
        (STUB_AUTHENTICATE.into(), 15_200_000, 10),
        (STUB_ADD_EMPLOYEE_CREDENTIALS.into(), 8_700_000, 20),
        (login_servlet_process_request(), 3_210_000, 10),
        (BEAN_AUTHENTICATE.into(), 1_170_000, 10),
        (BASE_DAO_INIT.into(), 235_000, 50),
        (EMPLOYEE_DAO_INIT.into(), 195_000, 50),
        (BEAN_ADD_CREDENTIALS.into(), 195_000, 20),
        (login_servlet_do_post(), 177_000, 10),
        (BEAN_ADD_CANDIDATE_PROFILE.into(), 175_000, 20),
        (EMPLOYEE_CREDENTIALS_INIT.into(), 117_000, 60),
        (WRAPPER_ADD_CANDIDATE_PROFILE.into(), 114_000, 20),
        (WRAPPER_ADD_EMPLOYEE_CREDENTIALS.into(), 109_000, 20),
        (CANDIDATE_PROFILE_INIT.into(), 104_000, 40),
        (WRAPPER_AUTHENTICATE.into(), 68_000, 10),
    ];
    let mut base_ns = BTreeMap::new();
    for (method, total, invocations) in rows {
        assert_eq!(total % invocations, 0, "{method}");
        base_ns.insert(MethodName::new(method).expect("valid"), total / invocations);
    }
    // The register chain's page and servlet frames carry the reference
    // table's remaining web-tier self time over 20 registrations, so the
    // table's summed self time (and with it every percentage) is preserved:
    //   page:    AddCandidate_jsp 5.47 + Welcome_jsp 1.86 + ViewProfile_jsp
    //            0.856 + the 27.3 ms of Login_jsp time from its 10 extra
    //            invocations = 35.486 ms
    //   servlet: HRProcessServlet.processRequest 13.3 + doGet 0.368 + the
    //            four one-off constructors 0.153 = 13.821 ms
    base_ns.insert(
        MethodName::new(register_jsp()).expect("valid"),
        35_486_000 / 20,
    );
    base_ns.insert(
        MethodName::new(registration_servlet()).expect("valid"),
        13_821_000 / 20,
    );
    LatencyModel {
        base_ns,
        jitter: 0.0,
        default_base_ns: 50_000,
    }
}

/// 20 registrations and 10 logins by 20 concurrent users, no jitter.
pub fn figure8_preset() -> WorkloadSpec {
    WorkloadSpec {
        executions: BTreeMap::from([(REGISTER.to_string(), 20), (LOGIN.to_string(), 10)]),
        seed: 0,
        latency: figure8_latency(),
        thread_count: 20,
    }
}

/// The preset's work spread over `users` threads. Latencies do not depend on
/// the thread count.
pub fn load_preset(users: u32, jitter: f64, seed: u64) -> WorkloadSpec {
    let mut spec = figure8_preset();
    spec.thread_count = users.max(1);
    spec.latency.jitter = jitter;
    spec.seed = seed;
    spec
}

pub fn preset(name: &str) -> Result<WorkloadSpec> {
    match name {
        "figure8" => Ok(figure8_preset()),
        other => Err(Error::UnknownPreset(other.to_string())),
    }
}

/// Spec file layout (TOML). Every field is optional; `preset` picks the
/// starting point and the other fields override it.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WorkloadFile {
    pub preset: Option<String>,
    pub seed: Option<u64>,
    pub threads: Option<u32>,
    pub jitter: Option<f64>,
    pub default_base_ns: Option<u64>,
    #[serde(default)]
    pub executions: BTreeMap<String, u64>,
    #[serde(default)]
    pub base_ns: BTreeMap<String, u64>,
}

impl WorkloadFile {
    pub fn parse(text: &str) -> Result<Self> {
        Ok(toml::from_str(text)?)
    }

    pub fn into_spec(self) -> Result<WorkloadSpec> {
        let mut spec = match &self.preset {
            Some(name) => preset(name)?,
            None => WorkloadSpec {
                executions: BTreeMap::new(),
                seed: 0,
                latency: LatencyModel::default(),
                thread_count: 1,
            },
        };
        if !self.executions.is_empty() {
            spec.executions = self.executions;
        }
        if let Some(seed) = self.seed {
            spec.seed = seed;
        }
        if let Some(threads) = self.threads {
            spec.thread_count = threads;
        }
        if let Some(jitter) = self.jitter {
            spec.latency.jitter = jitter;
        }
        if let Some(base) = self.default_base_ns {
            spec.latency.default_base_ns = base;
        }
        for (method, ns) in self.base_ns {
            spec.latency.base_ns.insert(MethodName::new(method)?, ns);
        }
        spec.validate()?;
        Ok(spec)
    }
}

/// Compact generated event; `frame` indexes the chain's pre-order frames.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
struct RawEvent {
    ts: u64,
    tid: u32,
    seq: u64,
    kind_exit: bool,
    chain: u16,
    frame: u32,
}

struct Expander<'a> {
    latency: &'a LatencyModel,
    rng: Option<ChaCha8Rng>,
}

impl Expander<'_> {
    fn duration(&mut self, method: &MethodName, frame_index: usize) -> u64 {
        let u = match self.rng.as_mut() {
            Some(rng) => {
                rng.set_word_pos(frame_index as u128 * 4);
                rng.random::<f64>()
            }
            None => 0.5,
        };
        self.latency.realize(method, u)
    }
}

/// Execution order: round-robin over use cases in canonical order, one
/// execution of each remaining use case per round.
fn execution_order(spec: &WorkloadSpec) -> Vec<(usize, u64)> {
    let counts: Vec<u64> = USE_CASES.iter().map(|u| spec.count(u)).collect();
    let rounds = counts.iter().copied().max().unwrap_or(0);
    let mut order = Vec::with_capacity(counts.iter().sum::<u64>() as usize);
    for round in 0..rounds {
        for (uc, &count) in counts.iter().enumerate() {
            if round < count {
                order.push((uc, round));
            }
        }
    }
    order
}

/// Generates the trace as canonical tab-separated text.
pub fn simulate(spec: &WorkloadSpec) -> Result<String> {
    spec.validate()?;
    let scenarios = hr_scenarios();
    let chains: Vec<Vec<&Frame>> = USE_CASES
        .iter()
        .map(|u| scenarios[*u].root.preorder())
        .collect();
    // Child frame indices (pre-order numbering) per chain.
    let layouts: Vec<Vec<Vec<usize>>> = chains.iter().map(|frames| child_layout(frames)).collect();

    let threads = spec.thread_count as usize;
    let mut clocks = vec![0u64; threads];
    let mut seqs = vec![0u64; threads];
    let mut events: Vec<RawEvent> = Vec::new();

    for (position, (uc, exec_index)) in execution_order(spec).into_iter().enumerate() {
        let slot = position % threads;
        let tid = slot as u32 + 1;
        let rng = (spec.latency.jitter != 0.0).then(|| {
            let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
            rng.set_stream(((uc as u64) << 48) | exec_index);
            rng
        });
        let mut expander = Expander {
            latency: &spec.latency,
            rng,
        };
        let mut emit = |ts: u64, exit: bool, frame: usize| {
            events.push(RawEvent {
                ts,
                tid,
                seq: seqs[slot],
                kind_exit: exit,
                chain: uc as u16,
                frame: frame as u32,
            });
            seqs[slot] += 1;
        };
        clocks[slot] = expand(
            &chains[uc],
            &layouts[uc],
            0,
            clocks[slot],
            &mut expander,
            &mut emit,
        );
    }

    events.sort_unstable_by_key(|e| (e.ts, e.tid, e.seq));

    let mut out = String::with_capacity(events.len() * 96 + 128);
    out.push_str("# cct-lens synthetic trace\n");
    out.push_str(&format!(
        "# seed={} threads={} jitter={} executions={}\n",
        spec.seed,
        spec.thread_count,
        spec.latency.jitter,
        USE_CASES
            .iter()
            .map(|u| format!("{u}:{}", spec.count(u)))
            .collect::<Vec<_>>()
            .join(",")
    ));
    for e in &events {
        let method = &chains[e.chain as usize][e.frame as usize].method;
        let kind = if e.kind_exit {
            EventKind::Exit
        } else {
            EventKind::Enter
        };
        out.push_str(&format!(
            "{}\t{}\t{}\t{}\n",
            e.ts,
            e.tid,
            kind.code(),
            method
        ));
    }
    Ok(out)
}

fn child_layout(frames: &[&Frame]) -> Vec<Vec<usize>> {
    // In pre-order, a frame's first child follows it directly and each later
    // child follows the previous child's whole subtree.
    fn size(f: &Frame) -> usize {
        1 + f.children.iter().map(size).sum::<usize>()
    }
    frames
        .iter()
        .enumerate()
        .map(|(i, f)| {
            let mut next = i + 1;
            f.children
                .iter()
                .map(|c| {
                    let idx = next;
                    next += size(c);
                    idx
                })
                .collect()
        })
        .collect()
}

/// Emits enter/exit events for frame `index` starting at `start`; returns
/// the exit timestamp. Self time is split around the callees.
fn expand(
    frames: &[&Frame],
    layout: &[Vec<usize>],
    index: usize,
    start: u64,
    expander: &mut Expander<'_>,
    emit: &mut impl FnMut(u64, bool, usize),
) -> u64 {
    let self_time = expander.duration(&frames[index].method, index);
    let children = &layout[index];
    let before = if children.is_empty() {
        self_time
    } else {
        self_time / 2
    };
    emit(start, false, index);
    let mut t = start + before;
    for &child in children {
        t = expand(frames, layout, child, t, expander, emit);
    }
    t += self_time - before;
    emit(t, true, index);
    t
}
