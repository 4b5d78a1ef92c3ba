//! Method-to-component classification and per-component utilization.
//!
//! A catalog is an ordered rule list; the first rule whose pattern matches a
//! method decides its component and tier. Methods no rule matches fall back
//! to their declaring type's simple name in tier `Other`.
//!
//! Catalog files hold one rule per line, `tier<TAB>component<TAB>pattern`,
//! with `#` comments. A component of `*` stands for the declaring type's
//! simple name of the matched method.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::filters::FilterPattern;
use crate::metrics::{share, HotSpotRow};
use crate::trace_model::MethodName;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Tier {
    Web,
    Business,
    Dao,
    Middleware,
    Other,
}

impl Tier {
    pub fn name(self) -> &'static str {
        match self {
            Tier::Web => "web",
            Tier::Business => "business",
            Tier::Dao => "dao",
            Tier::Middleware => "middleware",
            Tier::Other => "other",
        }
    }
}

impl fmt::Display for Tier {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Tier {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "web" => Ok(Tier::Web),
            "business" => Ok(Tier::Business),
            "dao" => Ok(Tier::Dao),
            "middleware" => Ok(Tier::Middleware),
            "other" => Ok(Tier::Other),
            _ => Err(format!("unknown tier `{s}`")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ComponentLabel {
    Named(String),
    /// The declaring type of whichever method matched.
    DeclaringType,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ComponentRule {
    pub pattern: FilterPattern,
    pub component: ComponentLabel,
    pub tier: Tier,
}

impl ComponentRule {
    fn named(tier: Tier, component: &str, pattern: &str) -> Self {
        ComponentRule {
            pattern: FilterPattern::new(pattern).expect("built-in patterns are valid"),
            component: ComponentLabel::Named(component.to_string()),
            tier,
        }
    }

    fn by_type(tier: Tier, pattern: &str) -> Self {
        ComponentRule {
            pattern: FilterPattern::new(pattern).expect("built-in patterns are valid"),
            component: ComponentLabel::DeclaringType,
            tier,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ComponentCatalog {
    pub rules: Vec<ComponentRule>,
}

impl ComponentCatalog {
    pub fn classify(&self, method: &MethodName) -> (String, Tier) {
        for rule in &self.rules {
            if rule.pattern.matches(method.as_str()) {
                let component = match &rule.component {
                    ComponentLabel::Named(name) => name.clone(),
                    ComponentLabel::DeclaringType => method.declaring_type().to_string(),
                };
                return (component, rule.tier);
            }
        }
        (method.declaring_type().to_string(), Tier::Other)
    }

    /// Explicitly named components of a tier, in rule order.
    pub fn named_components(&self, tier: Tier) -> Vec<&str> {
        let mut names: Vec<&str> = Vec::new();
        for rule in self.rules.iter().filter(|r| r.tier == tier) {
            if let ComponentLabel::Named(name) = &rule.component {
                if !names.contains(&name.as_str()) {
                    names.push(name);
                }
            }
        }
        names
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut rules = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line_no = i + 1;
            let line = raw.trim_end_matches('\r');
            if line.trim().is_empty() || line.trim_start().starts_with('#') {
                continue;
            }
            let fields: Vec<&str> = line.split('\t').collect();
            let err = |reason: String| Error::Catalog {
                line: line_no,
                reason,
            };
            if fields.len() != 3 {
                return Err(err(format!(
                    "expected `tier<TAB>component<TAB>pattern`, found {} field(s)",
                    fields.len()
                )));
            }
            let tier = fields[0].parse::<Tier>().map_err(err)?;
            let component = match fields[1] {
                "" => return Err(err("empty component".to_string())),
                "*" => ComponentLabel::DeclaringType,
                name => ComponentLabel::Named(name.to_string()),
            };
            let pattern = FilterPattern::new(fields[2]).map_err(|e| err(e.to_string()))?;
            rules.push(ComponentRule {
                pattern,
                component,
                tier,
            });
        }
        Ok(ComponentCatalog { rules })
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for rule in &self.rules {
            let component = match &rule.component {
                ComponentLabel::Named(name) => name.as_str(),
                ComponentLabel::DeclaringType => "*",
            };
            out.push_str(&format!("{}\t{}\t{}\n", rule.tier, component, rule.pattern));
        }
        out
    }
}

const BEANS: [(&str, &str); 3] = [
    ("EmployeeBean", "EmployeeBeanBean"),
    ("InterviewResultsBean", "InterviewResultsBean"),
    ("HRProcessBean", "HRProcessBean"),
];

const DAOS: [&str; 5] = [
    "BaseDAO",
    "EmployeeDAO",
    "InterviewDAO",
    "HRDAO",
    "ProcessDAO",
];

/// The HR Portal catalog. Rule order: middleware (EJB container packages,
/// then the generated remote stubs and wrappers), DAO, business, web. Stubs
/// and wrappers live in the same package as the beans, so they must come
/// first.
pub fn default_hr_catalog() -> ComponentCatalog {
    let mut rules = vec![
        ComponentRule::named(Tier::Middleware, "EJBContainer", "com.sun.ejb.*"),
        ComponentRule::named(Tier::Middleware, "EJBContainer", "javax.ejb.*"),
    ];
    for (bean, _) in BEANS {
        for suffix in ["Remote_DynamicStub", "RemoteWrapper"] {
            rules.push(ComponentRule::named(
                Tier::Middleware,
                "EJBContainer",
                &format!("com.mycompany.hr.process._{bean}Remote{suffix}.*"),
            ));
        }
    }
    for dao in DAOS {
        rules.push(ComponentRule::named(
            Tier::Dao,
            dao,
            &format!("com.mycompany.hr.dao.{dao}.*"),
        ));
    }
    rules.push(ComponentRule::by_type(Tier::Dao, "com.mycompany.hr.dao.*"));
    for (bean, class) in BEANS {
        rules.push(ComponentRule::named(
            Tier::Business,
            bean,
            &format!("com.mycompany.hr.process.{class}*"),
        ));
    }
    // Value objects belong to the business-tier class model.
    rules.push(ComponentRule::by_type(
        Tier::Business,
        "com.mycompany.hr.vo.*",
    ));
    rules.push(ComponentRule::named(
        Tier::Web,
        "HRProcessServlet",
        "com.mycompany.hr.process.HRProcessServlet.*",
    ));
    rules.push(ComponentRule::by_type(Tier::Web, "org.apache.jsp.*"));
    rules.push(ComponentRule::by_type(
        Tier::Web,
        "com.mycompany.hr.servlet.*",
    ));
    ComponentCatalog { rules }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ComponentUtilizationRow {
    pub component: String,
    pub tier: Tier,
    pub self_time: u64,
    pub utilization_pct: Ratio<u64>,
    pub invocations: u64,
}

pub fn component_utilization(
    rows: &[HotSpotRow],
    catalog: &ComponentCatalog,
) -> Vec<ComponentUtilizationRow> {
    let mut groups: Vec<ComponentUtilizationRow> = Vec::new();
    let mut index: HashMap<(String, Tier), usize> = HashMap::new();
    for row in rows {
        let key = catalog.classify(&row.method);
        let slot = *index.entry(key.clone()).or_insert_with(|| {
            groups.push(ComponentUtilizationRow {
                component: key.0.clone(),
                tier: key.1,
                self_time: 0,
                utilization_pct: Ratio::from_integer(0),
                invocations: 0,
            });
            groups.len() - 1
        });
        groups[slot].self_time += row.self_time;
        groups[slot].invocations += row.invocations;
    }
    let total: u64 = groups.iter().map(|g| g.self_time).sum();
    for g in &mut groups {
        g.utilization_pct = share(g.self_time, total);
    }
    groups.sort_by(|a, b| {
        b.self_time
            .cmp(&a.self_time)
            .then_with(|| a.component.cmp(&b.component))
            .then_with(|| a.tier.cmp(&b.tier))
    });
    groups
}

/// Self time summed per tier, largest first.
pub fn tier_totals(rows: &[ComponentUtilizationRow]) -> Vec<(Tier, u64)> {
    let mut totals: Vec<(Tier, u64)> = Vec::new();
    for row in rows {
        match totals.iter_mut().find(|(t, _)| *t == row.tier) {
            Some((_, sum)) => *sum += row.self_time,
            None => totals.push((row.tier, row.self_time)),
        }
    }
    totals.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
    totals
}
