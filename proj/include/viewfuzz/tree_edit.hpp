// Copyright 2026 The viewfuzz Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <algorithm>
#include <string>
#include <utility>
#include <vector>

#include "viewfuzz/view.hpp"

namespace viewfuzz {

struct EditOp {
  enum class Kind { kDelete, kInsert, kRelabel };
  Kind kind;
  int from = -1;  ///< preorder id in the source tree (delete, relabel)
  int to = -1;    ///< preorder id in the target tree (insert, relabel)

  friend bool operator==(const EditOp&, const EditOp&) = default;
};

struct EditScript {
  std::vector<EditOp> ops;
  int cost = 0;
};

namespace detail {

// Postorder view of a labelled ordered tree, 1-based as in the classic
// formulation: lml[i] is the leftmost leaf descendant of node i.
struct PostorderTree {
  std::vector<std::string> label;  // [0] unused
  std::vector<int> lml;
  std::vector<int> preorder_id;
  std::vector<int> keyroots;

  explicit PostorderTree(const ViewNode& root) {
    label.emplace_back();
    lml.push_back(0);
    preorder_id.push_back(-1);
    build(root);
    int n = size();
    std::vector<bool> seen(n + 1, false);
    for (int i = n; i >= 1; --i) {
      if (!seen[lml[i]]) {
        keyroots.push_back(i);
        seen[lml[i]] = true;
      }
    }
    std::sort(keyroots.begin(), keyroots.end());
  }

  int size() const { return static_cast<int>(label.size()) - 1; }

 private:
  int build(const ViewNode& n) {
    int first_leaf = -1;
    for (const auto& c : n.children) {
      int leaf = build(c);
      if (first_leaf < 0) first_leaf = leaf;
    }
    label.push_back(encode_view(n, false));
    preorder_id.push_back(n.node_id);
    int me = size();
    lml.push_back(first_leaf < 0 ? me : first_leaf);
    return lml[me];
  }
};

class ZhangShasha {
 public:
  ZhangShasha(const PostorderTree& a, const PostorderTree& b)
      : a_(a), b_(b),
        tree_(a.size() + 1, std::vector<int>(b.size() + 1, 0)) {
    for (int i : a_.keyroots)
      for (int j : b_.keyroots) forest(i, j);
  }

  int distance() const { return tree_[a_.size()][b_.size()]; }

  EditScript script() {
    EditScript out;
    out.cost = distance();
    if (a_.size() == 0 && b_.size() == 0) return out;
    std::vector<std::pair<int, int>> pending{{a_.size(), b_.size()}};
    while (!pending.empty()) {
      auto [i, j] = pending.back();
      pending.pop_back();
      backtrack(i, j, pending, out.ops);
    }
    return out;
  }

 private:
  int relabel(int i, int j) const { return a_.label[i] == b_.label[j] ? 0 : 1; }

  // Fills fd_ for the forests of keyroot pair (i, j); offsets map node ids
  // into the local table.
  void forest(int i, int j) {
    int li = a_.lml[i], lj = b_.lml[j];
    int m = i - li + 2, n = j - lj + 2;
    fd_.assign(m, std::vector<int>(n, 0));
    int ioff = li - 1, joff = lj - 1;
    for (int x = 1; x < m; ++x) fd_[x][0] = fd_[x - 1][0] + 1;
    for (int y = 1; y < n; ++y) fd_[0][y] = fd_[0][y - 1] + 1;
    for (int x = 1; x < m; ++x) {
      for (int y = 1; y < n; ++y) {
        int ax = x + ioff, by = y + joff;
        if (a_.lml[ax] == li && b_.lml[by] == lj) {
          fd_[x][y] = std::min({fd_[x - 1][y] + 1, fd_[x][y - 1] + 1,
                                fd_[x - 1][y - 1] + relabel(ax, by)});
          tree_[ax][by] = fd_[x][y];
        } else {
          int px = a_.lml[ax] - 1 - ioff, py = b_.lml[by] - 1 - joff;
          fd_[x][y] = std::min({fd_[x - 1][y] + 1, fd_[x][y - 1] + 1,
                                fd_[px][py] + tree_[ax][by]});
        }
      }
    }
  }

  void backtrack(int i, int j, std::vector<std::pair<int, int>>& pending,
                 std::vector<EditOp>& ops) {
    int li = i > 0 ? a_.lml[i] : 1, lj = j > 0 ? b_.lml[j] : 1;
    if (i > 0 && j > 0) {
      forest(i, j);
    } else {
      // one side empty: plain deletions or insertions
      for (int x = i; x >= li && i > 0; --x)
        ops.push_back({EditOp::Kind::kDelete, a_.preorder_id[x], -1});
      for (int y = j; y >= lj && j > 0; --y)
        ops.push_back({EditOp::Kind::kInsert, -1, b_.preorder_id[y]});
      return;
    }
    int ioff = li - 1, joff = lj - 1;
    int x = i - ioff, y = j - joff;
    while (x > 0 || y > 0) {
      int ax = x + ioff, by = y + joff;
      if (x == 0) {
        ops.push_back({EditOp::Kind::kInsert, -1, b_.preorder_id[by]});
        --y;
      } else if (y == 0) {
        ops.push_back({EditOp::Kind::kDelete, a_.preorder_id[ax], -1});
        --x;
      } else if (fd_[x][y] == fd_[x - 1][y] + 1) {
        ops.push_back({EditOp::Kind::kDelete, a_.preorder_id[ax], -1});
        --x;
      } else if (fd_[x][y] == fd_[x][y - 1] + 1) {
        ops.push_back({EditOp::Kind::kInsert, -1, b_.preorder_id[by]});
        --y;
      } else if (a_.lml[ax] == li && b_.lml[by] == lj) {
        if (relabel(ax, by))
          ops.push_back({EditOp::Kind::kRelabel, a_.preorder_id[ax],
                         b_.preorder_id[by]});
        --x;
        --y;
      } else {
        pending.emplace_back(ax, by);
        x = a_.lml[ax] - 1 - ioff;
        y = b_.lml[by] - 1 - joff;
      }
    }
  }

  const PostorderTree& a_;
  const PostorderTree& b_;
  std::vector<std::vector<int>> tree_;
  std::vector<std::vector<int>> fd_;
};

}  // namespace detail

/// Minimum-cost edit script (unit insert/delete/relabel costs) turning `t1`
/// into `t2`. Node labels are shallow view encodings; ids in the script refer
/// to the preorder node ids of each input tree.
inline EditScript tree_edit_script(const ViewNode& t1, const ViewNode& t2) {
  detail::PostorderTree a(t1), b(t2);
  detail::ZhangShasha zs(a, b);
  EditScript s = zs.script();
  std::sort(s.ops.begin(), s.ops.end(), [](const EditOp& x, const EditOp& y) {
    return std::tie(x.kind, x.from, x.to) < std::tie(y.kind, y.from, y.to);
  });
  return s;
}

inline int tree_edit_distance(const ViewNode& t1, const ViewNode& t2) {
  detail::PostorderTree a(t1), b(t2);
  return detail::ZhangShasha(a, b).distance();
}

}  // namespace viewfuzz
