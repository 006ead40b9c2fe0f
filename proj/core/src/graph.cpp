#include "mdst/graph.hpp"

#include <algorithm>
#include <charconv>
#include <queue>
#include <unordered_set>

namespace mdst {

namespace {

// Splits text into lines, stripping '\r' and skipping blanks and '#' comments.
std::vector<std::string_view> content_lines(std::string_view text) {
    std::vector<std::string_view> lines;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        std::size_t end = text.find('\n', pos);
        if (end == std::string_view::npos) end = text.size();
        std::string_view line = text.substr(pos, end - pos);
        pos = end + 1;
        while (!line.empty() && (line.back() == '\r' || line.back() == ' ' || line.back() == '\t'))
            line.remove_suffix(1);
        while (!line.empty() && (line.front() == ' ' || line.front() == '\t'))
            line.remove_prefix(1);
        if (line.empty() || line.front() == '#') continue;
        lines.push_back(line);
        if (end == text.size()) break;
    }
    return lines;
}

// Parses exactly `count` integers from a line; anything else is an error.
std::vector<long long> parse_ints(std::string_view line, int count) {
    std::vector<long long> out;
    std::size_t i = 0;
    while (i < line.size()) {
        while (i < line.size() && (line[i] == ' ' || line[i] == '\t')) ++i;
        if (i >= line.size()) break;
        std::size_t j = i;
        while (j < line.size() && line[j] != ' ' && line[j] != '\t') ++j;
        long long value = 0;
        auto [ptr, ec] = std::from_chars(line.data() + i, line.data() + j, value);
        if (ec != std::errc{} || ptr != line.data() + j)
            throw ParseError("bad token '" + std::string(line.substr(i, j - i)) + "'");
        out.push_back(value);
        i = j;
    }
    if (static_cast<int>(out.size()) != count)
        throw ParseError("expected " + std::to_string(count) + " integers on line '" +
                         std::string(line) + "'");
    return out;
}

}  // namespace

Graph Graph::from_edges(Node n, const std::vector<Edge>& raw, LoadReport* report) {
    if (n < 1) throw InputError("graph must have at least one node");
    Graph g;
    g.n_ = n;
    g.adj_.resize(static_cast<std::size_t>(n));

    std::unordered_set<std::uint64_t> seen;
    seen.reserve(raw.size() * 2);
    int duplicates = 0;
    for (const Edge& e : raw) {
        if (e.u < 0 || e.u >= n || e.v < 0 || e.v >= n)
            throw ParseError("edge endpoint out of range: " + std::to_string(e.u) + " " +
                             std::to_string(e.v));
        if (e.u == e.v) throw ParseError("self loop at node " + std::to_string(e.u));
        Node a = std::min(e.u, e.v);
        Node b = std::max(e.u, e.v);
        std::uint64_t key = (static_cast<std::uint64_t>(a) << 32) | static_cast<std::uint32_t>(b);
        if (!seen.insert(key).second) {
            ++duplicates;
            continue;
        }
        EdgeId id = static_cast<EdgeId>(g.edges_.size());
        g.edges_.push_back({e.u, e.v});
        g.adj_[static_cast<std::size_t>(e.u)].push_back({e.v, id});
        g.adj_[static_cast<std::size_t>(e.v)].push_back({e.u, id});
    }
    if (report) report->duplicate_edges_dropped = duplicates;

    // Connectivity check.
    std::vector<char> visited(static_cast<std::size_t>(n), 0);
    std::vector<Node> stack{0};
    visited[0] = 1;
    Node reached = 1;
    while (!stack.empty()) {
        Node u = stack.back();
        stack.pop_back();
        for (const AdjEntry& a : g.neighbors(u)) {
            if (!visited[static_cast<std::size_t>(a.to)]) {
                visited[static_cast<std::size_t>(a.to)] = 1;
                ++reached;
                stack.push_back(a.to);
            }
        }
    }
    if (reached != n) throw InputError("graph is disconnected");
    return g;
}

Graph Graph::parse(std::string_view text, LoadReport* report) {
    std::vector<std::string_view> lines = content_lines(text);
    if (lines.empty()) throw ParseError("empty input");
    std::vector<long long> header = parse_ints(lines[0], 2);
    long long n = header[0];
    long long m = header[1];
    if (n < 1 || n > (1LL << 30)) throw InputError("node count out of range: " + std::to_string(n));
    if (m < 0 || m > (1LL << 31)) throw ParseError("edge count out of range: " + std::to_string(m));
    if (static_cast<long long>(lines.size()) - 1 != m)
        throw ParseError("header promises " + std::to_string(m) + " edges but input has " +
                         std::to_string(lines.size() - 1) + " edge lines");
    std::vector<Edge> edges;
    edges.reserve(static_cast<std::size_t>(m));
    for (long long i = 0; i < m; ++i) {
        std::vector<long long> uv = parse_ints(lines[static_cast<std::size_t>(i + 1)], 2);
        if (uv[0] < 0 || uv[0] >= n || uv[1] < 0 || uv[1] >= n)
            throw ParseError("edge endpoint out of range on line '" +
                             std::string(lines[static_cast<std::size_t>(i + 1)]) + "'");
        edges.push_back({static_cast<Node>(uv[0]), static_cast<Node>(uv[1])});
    }
    return from_edges(static_cast<Node>(n), edges, report);
}

std::string Graph::write_edge_list() const {
    std::string out;
    out += std::to_string(n_);
    out += ' ';
    out += std::to_string(edge_count());
    out += '\n';
    for (const Edge& e : edges_) {
        out += std::to_string(e.u);
        out += ' ';
        out += std::to_string(e.v);
        out += '\n';
    }
    return out;
}

EdgeId Graph::find_edge(Node u, Node v) const {
    if (degree(u) > degree(v)) std::swap(u, v);
    for (const AdjEntry& a : neighbors(u))
        if (a.to == v) return a.edge;
    return kNoEdge;
}

void Dsu::reset(int n) {
    parent_.resize(static_cast<std::size_t>(n));
    size_.assign(static_cast<std::size_t>(n), 1);
    for (int i = 0; i < n; ++i) parent_[static_cast<std::size_t>(i)] = i;
    sets_ = n;
}

int Dsu::find(int a) {
    int root = a;
    while (parent_[static_cast<std::size_t>(root)] != root)
        root = parent_[static_cast<std::size_t>(root)];
    while (parent_[static_cast<std::size_t>(a)] != root) {
        int next = parent_[static_cast<std::size_t>(a)];
        parent_[static_cast<std::size_t>(a)] = root;
        a = next;
    }
    return root;
}

bool Dsu::unite(int a, int b) {
    a = find(a);
    b = find(b);
    if (a == b) return false;
    if (size_[static_cast<std::size_t>(a)] < size_[static_cast<std::size_t>(b)]) std::swap(a, b);
    parent_[static_cast<std::size_t>(b)] = a;
    size_[static_cast<std::size_t>(a)] += size_[static_cast<std::size_t>(b)];
    --sets_;
    return true;
}

RootedForest::RootedForest(const Graph& g)
    : graph_(&g),
      n_(g.node_count()),
      adj_(static_cast<std::size_t>(g.node_count())),
      in_forest_(static_cast<std::size_t>(g.edge_count()), 0),
      degree_(static_cast<std::size_t>(g.node_count()), 0),
      component_(static_cast<std::size_t>(g.node_count()), 0) {
    for (Node v = 0; v < n_; ++v) component_[static_cast<std::size_t>(v)] = v;
    components_fresh_ = true;
}

void RootedForest::link(Node u, Node v, EdgeId id) {
    if (id < 0 || id >= graph_->edge_count()) throw std::logic_error("link: bad edge id");
    Edge e = graph_->edge(id);
    if (!((e.u == u && e.v == v) || (e.u == v && e.v == u)))
        throw std::logic_error("link: edge id does not match endpoints");
    if (in_forest_[static_cast<std::size_t>(id)]) throw std::logic_error("link: edge already in forest");
    if (component_of(u) == component_of(v))
        throw std::logic_error("link: endpoints already connected");
    adj_[static_cast<std::size_t>(u)].push_back({v, id});
    adj_[static_cast<std::size_t>(v)].push_back({u, id});
    in_forest_[static_cast<std::size_t>(id)] = 1;
    ++degree_[static_cast<std::size_t>(u)];
    ++degree_[static_cast<std::size_t>(v)];
    ++forest_edge_count_;
    ++version_;
    components_fresh_ = false;
}

void RootedForest::cut(Node u, Node v) {
    EdgeId id = forest_edge_between(u, v);
    if (id == kNoEdge) throw std::logic_error("cut: edge not in forest");
    auto erase_from = [&](Node a) {
        auto& list = adj_[static_cast<std::size_t>(a)];
        for (std::size_t i = 0; i < list.size(); ++i) {
            if (list[i].edge == id) {
                list[i] = list.back();
                list.pop_back();
                return;
            }
        }
        throw std::logic_error("cut: adjacency out of sync");
    };
    erase_from(u);
    erase_from(v);
    in_forest_[static_cast<std::size_t>(id)] = 0;
    --degree_[static_cast<std::size_t>(u)];
    --degree_[static_cast<std::size_t>(v)];
    --forest_edge_count_;
    ++version_;
    components_fresh_ = false;
}

void RootedForest::apply(const EdgeEdit& edit) {
    if (edit.insert)
        link(edit.u, edit.v, edit.edge);
    else
        cut(edit.u, edit.v);
}

EdgeId RootedForest::forest_edge_between(Node u, Node v) const {
    const auto& list = adj_[static_cast<std::size_t>(u)].size() <=
                               adj_[static_cast<std::size_t>(v)].size()
                           ? adj_[static_cast<std::size_t>(u)]
                           : adj_[static_cast<std::size_t>(v)];
    Node other = adj_[static_cast<std::size_t>(u)].size() <= adj_[static_cast<std::size_t>(v)].size()
                     ? v
                     : u;
    for (const AdjEntry& a : list)
        if (a.to == other) return a.edge;
    return kNoEdge;
}

int RootedForest::max_degree() const {
    int best = 0;
    for (Node v = 0; v < n_; ++v) best = std::max(best, degree_[static_cast<std::size_t>(v)]);
    return best;
}

void RootedForest::refresh_components() const {
    std::fill(component_.begin(), component_.end(), -1);
    std::vector<Node> stack;
    for (Node s = 0; s < n_; ++s) {
        if (component_[static_cast<std::size_t>(s)] != -1) continue;
        component_[static_cast<std::size_t>(s)] = s;
        stack.push_back(s);
        while (!stack.empty()) {
            Node u = stack.back();
            stack.pop_back();
            for (const AdjEntry& a : adj_[static_cast<std::size_t>(u)]) {
                if (component_[static_cast<std::size_t>(a.to)] == -1) {
                    component_[static_cast<std::size_t>(a.to)] = s;
                    stack.push_back(a.to);
                }
            }
        }
    }
    components_fresh_ = true;
}

int RootedForest::component_of(Node v) const {
    if (!components_fresh_) refresh_components();
    return component_[static_cast<std::size_t>(v)];
}

std::vector<EdgeId> RootedForest::forest_edges() const {
    std::vector<EdgeId> out;
    out.reserve(static_cast<std::size_t>(forest_edge_count_));
    for (EdgeId id = 0; id < graph_->edge_count(); ++id)
        if (in_forest_[static_cast<std::size_t>(id)]) out.push_back(id);
    return out;
}

std::vector<Node> RootedForest::component_nodes(Node v) const {
    int label = component_of(v);
    std::vector<Node> out;
    for (Node u = 0; u < n_; ++u)
        if (component_[static_cast<std::size_t>(u)] == label) out.push_back(u);
    return out;
}

std::vector<Node> RootedForest::path_between(Node a, Node b) const {
    if (a == b) return {a};
    std::vector<Node> from(static_cast<std::size_t>(n_), kNoNode);
    std::vector<Node> queue{a};
    from[static_cast<std::size_t>(a)] = a;
    for (std::size_t head = 0; head < queue.size(); ++head) {
        Node u = queue[head];
        if (u == b) break;
        for (const AdjEntry& e : adj_[static_cast<std::size_t>(u)]) {
            if (from[static_cast<std::size_t>(e.to)] == kNoNode) {
                from[static_cast<std::size_t>(e.to)] = u;
                queue.push_back(e.to);
            }
        }
    }
    if (from[static_cast<std::size_t>(b)] == kNoNode) return {};
    std::vector<Node> path;
    for (Node u = b; u != a; u = from[static_cast<std::size_t>(u)]) path.push_back(u);
    path.push_back(a);
    std::reverse(path.begin(), path.end());
    return path;
}

RootedForest::Subtree RootedForest::subtree_of(Node u, Node blocked) const {
    if (u == blocked) throw std::logic_error("subtree_of: node equals the blocked node");
    Subtree out;
    out.member.assign(static_cast<std::size_t>(n_), 0);
    std::vector<Node> stack{u};
    out.member[static_cast<std::size_t>(u)] = 1;
    while (!stack.empty()) {
        Node x = stack.back();
        stack.pop_back();
        out.nodes.push_back(x);
        for (const AdjEntry& a : adj_[static_cast<std::size_t>(x)]) {
            if (a.to == blocked) continue;
            if (!out.member[static_cast<std::size_t>(a.to)]) {
                out.member[static_cast<std::size_t>(a.to)] = 1;
                stack.push_back(a.to);
            }
        }
    }
    std::sort(out.nodes.begin(), out.nodes.end());
    return out;
}

void RootedForest::rebuild(std::span<const Node> preferred_roots) {
    parent_.assign(static_cast<std::size_t>(n_), kNoNode);
    parent_edge_.assign(static_cast<std::size_t>(n_), kNoEdge);
    depth_.assign(static_cast<std::size_t>(n_), -1);
    root_.assign(static_cast<std::size_t>(n_), kNoNode);
    children_.assign(static_cast<std::size_t>(n_), {});

    auto grow = [&](Node r) {
        if (depth_[static_cast<std::size_t>(r)] != -1) return;
        depth_[static_cast<std::size_t>(r)] = 0;
        root_[static_cast<std::size_t>(r)] = r;
        std::vector<Node> stack{r};
        while (!stack.empty()) {
            Node u = stack.back();
            stack.pop_back();
            for (const AdjEntry& a : adj_[static_cast<std::size_t>(u)]) {
                if (depth_[static_cast<std::size_t>(a.to)] != -1) continue;
                depth_[static_cast<std::size_t>(a.to)] = depth_[static_cast<std::size_t>(u)] + 1;
                root_[static_cast<std::size_t>(a.to)] = r;
                parent_[static_cast<std::size_t>(a.to)] = u;
                parent_edge_[static_cast<std::size_t>(a.to)] = a.edge;
                children_[static_cast<std::size_t>(u)].push_back(a.to);
                stack.push_back(a.to);
            }
        }
    };
    for (Node r : preferred_roots) grow(r);
    for (Node v = 0; v < n_; ++v) grow(v);
    for (auto& kids : children_) std::sort(kids.begin(), kids.end());

    int max_depth = 0;
    for (Node v = 0; v < n_; ++v) max_depth = std::max(max_depth, depth_[static_cast<std::size_t>(v)]);
    int levels = 1;
    while ((1 << levels) <= max_depth) ++levels;
    up_.assign(static_cast<std::size_t>(levels), std::vector<Node>(static_cast<std::size_t>(n_)));
    for (Node v = 0; v < n_; ++v) {
        Node p = parent_[static_cast<std::size_t>(v)];
        up_[0][static_cast<std::size_t>(v)] = (p == kNoNode) ? v : p;
    }
    for (int k = 1; k < levels; ++k)
        for (Node v = 0; v < n_; ++v)
            up_[static_cast<std::size_t>(k)][static_cast<std::size_t>(v)] =
                up_[static_cast<std::size_t>(k - 1)]
                   [static_cast<std::size_t>(up_[static_cast<std::size_t>(k - 1)][static_cast<std::size_t>(v)])];

    snapshot_built_ = true;
    snapshot_version_ = version_;
}

Node RootedForest::ancestor_at_depth(Node v, int target_depth) const {
    if (!snapshot_built_) throw std::logic_error("ancestor_at_depth: no snapshot");
    int d = depth_[static_cast<std::size_t>(v)];
    if (target_depth > d) return kNoNode;
    if (target_depth < 0) return kNoNode;
    int delta = d - target_depth;
    for (int k = 0; delta != 0; ++k, delta >>= 1) {
        if (delta & 1) {
            v = up_[static_cast<std::size_t>(k)][static_cast<std::size_t>(v)];
            if (counters_) ++counters_->ancestor_hops;
        }
    }
    return v;
}

bool RootedForest::is_snapshot_ancestor(Node x, Node v) const {
    if (root_[static_cast<std::size_t>(x)] != root_[static_cast<std::size_t>(v)]) return false;
    int dx = depth_[static_cast<std::size_t>(x)];
    if (dx > depth_[static_cast<std::size_t>(v)]) return false;
    return ancestor_at_depth(v, dx) == x;
}

bool RootedForest::in_subtree(Node q, Node u, Node x) const {
    if (!snapshot_built_) throw std::logic_error("in_subtree: no snapshot");
    if (x == kNoNode)
        return root_[static_cast<std::size_t>(q)] == root_[static_cast<std::size_t>(u)];
    if (root_[static_cast<std::size_t>(u)] != root_[static_cast<std::size_t>(x)])
        throw std::logic_error("in_subtree: x is not an ancestor of u");
    int cut_depth = depth_[static_cast<std::size_t>(x)] + 1;
    Node top = ancestor_at_depth(u, cut_depth);
    if (top == kNoNode || ancestor_at_depth(top, depth_[static_cast<std::size_t>(x)]) != x)
        throw std::logic_error("in_subtree: x is not a proper ancestor of u");
    if (root_[static_cast<std::size_t>(q)] != root_[static_cast<std::size_t>(u)]) return false;
    if (depth_[static_cast<std::size_t>(q)] < cut_depth) return false;
    return ancestor_at_depth(q, cut_depth) == top;
}

}  // namespace mdst
