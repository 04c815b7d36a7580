//! In-process mock target: three views over a fixed page graph, CRUD forms
//! backed by in-memory tables, bearer-token auth and a declarative fault
//! table keyed by `(path, action)`.
//!
//! Public pages: `/`, `/public/courses`, `/public/courses/detail` and
//! `/public/about`, joined by five links. Professor and student sections each
//! hang off their own entry page.

use std::collections::BTreeMap;
use std::net::SocketAddr;
use std::sync::atomic::{AtomicBool, AtomicU64, Ordering};
use std::sync::{Arc, Mutex, RwLock};
use std::thread::JoinHandle;
use std::time::Duration;

use ei_core::View;
use serde::{Deserialize, Serialize};
use tiny_http::{Header, Method, Request, Response, Server};
use url::Url;

use crate::Action;

pub const PROFESSOR_TOKEN: &str = "prof-secret";
pub const STUDENT_TOKEN: &str = "student-secret";
/// Text a faulty page embeds in an otherwise successful response.
pub const ERROR_MARKER: &str = "EI-FIXTURE-ERROR";

pub struct PageSpec {
    pub path: &'static str,
    pub view: View,
    pub title: &'static str,
    pub links: &'static [&'static str],
    /// Form actions besides `read`.
    pub forms: &'static [Action],
}

use Action::{Delete, Insert, Update};

pub const PAGES: &[PageSpec] = &[
    PageSpec { path: "/", view: View::Public, title: "Home", links: &["/public/courses", "/public/about"], forms: &[] },
    PageSpec {
        path: "/public/about",
        view: View::Public,
        title: "About",
        links: &[],
        forms: &[],
    },
    PageSpec {
        path: "/public/courses",
        view: View::Public,
        title: "Course catalogue",
        links: &["/public/courses/detail", "/"],
        forms: &[],
    },
    PageSpec {
        path: "/public/courses/detail",
        view: View::Public,
        title: "Course detail",
        links: &["/public/courses"],
        forms: &[],
    },
    PageSpec {
        path: "/professor/",
        view: View::Professor,
        title: "Professor home",
        links: &["/professor/courses", "/professor/grades", "/professor/students"],
        forms: &[],
    },
    PageSpec {
        path: "/professor/courses",
        view: View::Professor,
        title: "My courses",
        links: &["/professor/"],
        forms: &[Insert, Update, Delete],
    },
    PageSpec { path: "/professor/grades", view: View::Professor, title: "Grades", links: &["/professor/"], forms: &[Update] },
    PageSpec { path: "/professor/students", view: View::Professor, title: "Students", links: &["/professor/"], forms: &[] },
    PageSpec {
        path: "/student/",
        view: View::Student,
        title: "Student home",
        links: &["/student/registrations", "/student/profile"],
        forms: &[],
    },
    PageSpec {
        path: "/student/registrations",
        view: View::Student,
        title: "Registrations",
        links: &["/student/"],
        forms: &[Insert, Delete],
    },
    PageSpec { path: "/student/profile", view: View::Student, title: "Profile", links: &["/student/"], forms: &[Update] },
];

pub fn page(path: &str) -> Option<&'static PageSpec> {
    PAGES.iter().find(|p| p.path == path)
}

pub fn entry_point(view: View) -> &'static str {
    match view {
        View::Professor => "/professor/",
        View::Student => "/student/",
        View::Public => "/",
    }
}

pub fn token_for(view: View) -> Option<&'static str> {
    match view {
        View::Professor => Some(PROFESSOR_TOKEN),
        View::Student => Some(STUDENT_TOKEN),
        View::Public => None,
    }
}

/// Every `(path, action)` pair the fixture serves.
pub fn all_pairs() -> Vec<(&'static str, Action)> {
    PAGES
        .iter()
        .flat_map(|p| std::iter::once(Action::Read).chain(p.forms.iter().copied()).map(move |a| (p.path, a)))
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FaultKind {
    /// Respond with this HTTP status.
    Status(u16),
    /// Respond 200 with [`ERROR_MARKER`] in the body.
    ErrorMarker,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SeededFault {
    pub path: String,
    pub action: Action,
    pub kind: FaultKind,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct FaultTable {
    pub faults: Vec<SeededFault>,
}

impl FaultTable {
    pub fn new() -> Self {
        FaultTable::default()
    }

    /// Add or replace the fault on `(path, action)`.
    pub fn with(mut self, path: &str, action: Action, kind: FaultKind) -> Self {
        self.faults.retain(|f| !(f.path == path && f.action == action));
        self.faults.push(SeededFault { path: path.into(), action, kind });
        self
    }

    pub fn lookup(&self, path: &str, action: Action) -> Option<FaultKind> {
        self.faults.iter().find(|f| f.path == path && f.action == action).map(|f| f.kind)
    }

    pub fn len(&self) -> usize {
        self.faults.len()
    }

    pub fn is_empty(&self) -> bool {
        self.faults.is_empty()
    }

    /// 404 and 503 are reserved for missing pages and outages.
    pub fn validate(&self) -> Result<(), String> {
        for f in &self.faults {
            if let FaultKind::Status(code) = f.kind {
                if !(400..600).contains(&code) || code == 404 || code == 503 {
                    return Err(format!("{} {}: status {code} cannot be seeded", f.path, f.action));
                }
            }
        }
        Ok(())
    }
}

struct Shared {
    faults: RwLock<FaultTable>,
    outage: AtomicBool,
    stop: AtomicBool,
    requests: AtomicU64,
    tables: Mutex<BTreeMap<&'static str, Vec<String>>>,
}

/// A running mock target. Dropping it stops the server.
pub struct MockTarget {
    shared: Arc<Shared>,
    addr: SocketAddr,
    threads: Vec<JoinHandle<()>>,
}

impl MockTarget {
    /// Serve on an ephemeral local port.
    pub fn start(faults: FaultTable) -> std::io::Result<Self> {
        Self::bind("127.0.0.1:0", faults, 8)
    }

    pub fn bind(addr: &str, faults: FaultTable, workers: usize) -> std::io::Result<Self> {
        faults.validate().map_err(std::io::Error::other)?;
        let server = Arc::new(Server::http(addr).map_err(std::io::Error::other)?);
        let addr = server.server_addr().to_ip().ok_or_else(|| std::io::Error::other("not an IP listener"))?;
        let shared = Arc::new(Shared {
            faults: RwLock::new(faults),
            outage: AtomicBool::new(false),
            stop: AtomicBool::new(false),
            requests: AtomicU64::new(0),
            tables: Mutex::new(BTreeMap::new()),
        });
        let threads = (0..workers.max(1))
            .map(|_| {
                let server = Arc::clone(&server);
                let shared = Arc::clone(&shared);
                std::thread::spawn(move || {
                    while !shared.stop.load(Ordering::Relaxed) {
                        match server.recv_timeout(Duration::from_millis(50)) {
                            Ok(Some(req)) => handle(&shared, req),
                            Ok(None) => {}
                            Err(_) => break,
                        }
                    }
                })
            })
            .collect();
        Ok(MockTarget { shared, addr, threads })
    }

    pub fn addr(&self) -> SocketAddr {
        self.addr
    }

    pub fn url(&self) -> Url {
        Url::parse(&format!("http://{}/", self.addr)).expect("socket address forms a valid URL")
    }

    /// While set, every request is answered 503.
    pub fn set_outage(&self, down: bool) {
        self.shared.outage.store(down, Ordering::SeqCst);
    }

    pub fn set_faults(&self, faults: FaultTable) {
        *self.shared.faults.write().unwrap() = faults;
    }

    pub fn faults(&self) -> FaultTable {
        self.shared.faults.read().unwrap().clone()
    }

    pub fn request_count(&self) -> u64 {
        self.shared.requests.load(Ordering::Relaxed)
    }

    /// Block until the process is interrupted.
    pub fn serve_forever(mut self) {
        for t in self.threads.drain(..) {
            let _ = t.join();
        }
    }
}

impl Drop for MockTarget {
    fn drop(&mut self) {
        self.shared.stop.store(true, Ordering::SeqCst);
        for t in self.threads.drain(..) {
            let _ = t.join();
        }
    }
}

fn bearer(req: &Request) -> Option<String> {
    req.headers()
        .iter()
        .find(|h| h.field.equiv("Authorization"))
        .and_then(|h| h.value.as_str().strip_prefix("Bearer ").map(str::to_string))
}

fn html_response(status: u16, body: String) -> Response<std::io::Cursor<Vec<u8>>> {
    let ct = Header::from_bytes("Content-Type", "text/html; charset=utf-8").expect("static header");
    Response::from_string(body).with_status_code(status).with_header(ct)
}

fn handle(shared: &Shared, mut req: Request) {
    shared.requests.fetch_add(1, Ordering::Relaxed);
    let (status, body) = respond(shared, &mut req);
    let _ = req.respond(html_response(status, body));
}

fn respond(shared: &Shared, req: &mut Request) -> (u16, String) {
    if shared.outage.load(Ordering::SeqCst) {
        return (503, "<html><body>maintenance</body></html>".into());
    }
    let path = req.url().split(['?', '#']).next().unwrap_or("/").to_string();
    let Some(page) = page(&path) else {
        return (404, format!("<html><body>no page at {path}</body></html>"));
    };
    if let Some(token) = token_for(page.view) {
        if bearer(req).as_deref() != Some(token) {
            return (401, "<html><body>login required</body></html>".into());
        }
    }
    let mut fields: Vec<(String, String)> = Vec::new();
    let action = match req.method() {
        Method::Get | Method::Head => Action::Read,
        Method::Post => {
            let mut raw = Vec::new();
            if req.as_reader().read_to_end(&mut raw).is_err() {
                return (400, "<html><body>unreadable body</body></html>".into());
            }
            fields = url::form_urlencoded::parse(&raw).into_owned().collect();
            match fields.iter().find(|(k, _)| k == "_action").and_then(|(_, v)| v.parse::<Action>().ok()) {
                Some(a) if page.forms.contains(&a) => a,
                _ => return (405, "<html><body>action not offered here</body></html>".into()),
            }
        }
        _ => return (405, "<html><body>method not allowed</body></html>".into()),
    };

    let fault = shared.faults.read().unwrap().lookup(&path, action);
    if let Some(FaultKind::Status(code)) = fault {
        return (code, format!("<html><body>fault {code}</body></html>"));
    }
    let rows = {
        let mut tables = shared.tables.lock().unwrap();
        let table = tables.entry(page.path).or_default();
        let record = fields.iter().find(|(k, _)| k == "record").map(|(_, v)| v.clone()).unwrap_or_default();
        match action {
            Action::Insert => table.push(record),
            Action::Update => match table.last_mut() {
                Some(last) => *last = record,
                None => table.push(record),
            },
            Action::Delete => {
                table.pop();
            }
            Action::Read => {}
        }
        table.len()
    };
    let mut body = render(page, rows);
    if fault == Some(FaultKind::ErrorMarker) {
        body = body.replace("</body>", &format!("<p class=\"error\">{ERROR_MARKER}</p></body>"));
    }
    (200, body)
}

fn render(page: &PageSpec, rows: usize) -> String {
    let mut html = format!("<html><head><title>{}</title></head><body>\n<h1>{}</h1>\n<nav>", page.title, page.title);
    for link in page.links {
        html.push_str(&format!("<a href=\"{link}\">{link}</a> "));
    }
    html.push_str("</nav>\n");
    if !page.forms.is_empty() {
        html.push_str(&format!("<p>{rows} record(s)</p>\n"));
    }
    for action in page.forms {
        html.push_str(&format!(
            "<form method=\"post\" action=\"{}\"><input type=\"hidden\" name=\"_action\" value=\"{action}\">\
             <input name=\"record\"><button>{action}</button></form>\n",
            page.path
        ));
    }
    html.push_str("</body></html>\n");
    html
}
