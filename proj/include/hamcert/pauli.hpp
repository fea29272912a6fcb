// Copyright 2026 The hamcert Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <algorithm>
#include <cmath>
#include <compare>
#include <cstdint>
#include <iomanip>
#include <istream>
#include <limits>
#include <map>
#include <optional>
#include <ostream>
#include <random>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "hamcert/error.hpp"
#include "hamcert/linalg.hpp"
#include "hamcert/rng.hpp"

namespace hamcert {

/** Single-qubit Pauli label. The enum order is the enumeration order. */
enum class Pauli : std::uint8_t { I = 0, X = 1, Y = 2, Z = 3 };

inline char pauli_char(Pauli p) { return "IXYZ"[static_cast<int>(p)]; }

inline Pauli pauli_from_char(char c) {
  switch (c) {
    case 'I': return Pauli::I;
    case 'X': return Pauli::X;
    case 'Y': return Pauli::Y;
    case 'Z': return Pauli::Z;
    default:
      throw ParseError(std::string("invalid Pauli label '") + c + "'");
  }
}

inline Matrix pauli_matrix(Pauli p) {
  const Complex i1(0.0, 1.0);
  Matrix m(2, 2);
  switch (p) {
    case Pauli::I: m << 1, 0, 0, 1; break;
    case Pauli::X: m << 0, 1, 1, 0; break;
    case Pauli::Y: m << 0, -i1, i1, 0; break;
    case Pauli::Z: m << 1, 0, 0, -1; break;
  }
  return m;
}

/**
 * An n-site word over {I, X, Y, Z}.
 *
 * Ordering is lexicographic over sites (site 0 first) with I < X < Y < Z.
 */
class PauliString {
 public:
  PauliString() = default;

  explicit PauliString(std::vector<Pauli> sites) : sites_(std::move(sites)) {}

  explicit PauliString(std::string_view word) {
    sites_.reserve(word.size());
    for (char c : word) sites_.push_back(pauli_from_char(c));
  }

  static PauliString identity(int n) {
    return PauliString(std::vector<Pauli>(static_cast<std::size_t>(n), Pauli::I));
  }

  int qubits() const { return static_cast<int>(sites_.size()); }
  Pauli operator[](int site) const { return sites_[static_cast<std::size_t>(site)]; }
  const std::vector<Pauli>& sites() const { return sites_; }

  /// Number of non-identity sites.
  int weight() const {
    return static_cast<int>(std::count_if(sites_.begin(), sites_.end(),
                                          [](Pauli p) { return p != Pauli::I; }));
  }

  bool is_identity() const { return weight() == 0; }

  /// Indices of the non-identity sites, ascending.
  std::vector<int> support() const {
    std::vector<int> out;
    for (int i = 0; i < qubits(); ++i) {
      if (sites_[static_cast<std::size_t>(i)] != Pauli::I) out.push_back(i);
    }
    return out;
  }

  std::string str() const {
    std::string s;
    s.reserve(sites_.size());
    for (Pauli p : sites_) s.push_back(pauli_char(p));
    return s;
  }

  friend auto operator<=>(const PauliString&, const PauliString&) = default;
  friend bool operator==(const PauliString&, const PauliString&) = default;

  friend std::ostream& operator<<(std::ostream& os, const PauliString& p) {
    return os << p.str();
  }

 private:
  std::vector<Pauli> sites_;
};

/// Number of strings with 1 <= weight <= k on n sites: sum_l 3^l C(n,l).
inline std::uint64_t count_local_paulis(int n, int k) {
  std::uint64_t total = 0;
  std::uint64_t binom = 1;  // C(n, l)
  std::uint64_t pow3 = 1;
  for (int l = 1; l <= k; ++l) {
    binom = binom * static_cast<std::uint64_t>(n - l + 1) /
            static_cast<std::uint64_t>(l);
    pow3 *= 3;
    total += pow3 * binom;
  }
  return total;
}

/**
 * Every Pauli string on n sites with 1 <= weight <= k, each exactly once,
 * in lexicographic order (site 0 most significant, I < X < Y < Z).
 */
inline std::vector<PauliString> enumerate_local_paulis(int n, int k) {
  if (k < 1 || k > n) {
    throw InvalidArgument("enumerate_local_paulis: need 1 <= k <= n, got n=" +
                          std::to_string(n) + " k=" + std::to_string(k));
  }
  if (n > 16) {
    throw DimensionError("enumerate_local_paulis: n too large for 4^n scan");
  }
  std::vector<PauliString> out;
  out.reserve(count_local_paulis(n, k));
  std::vector<Pauli> word(static_cast<std::size_t>(n), Pauli::I);
  // Odometer over {I,X,Y,Z}^n with the last site varying fastest.
  const std::uint64_t total = std::uint64_t{1} << (2 * n);
  for (std::uint64_t code = 0; code < total; ++code) {
    int weight = 0;
    for (int site = 0; site < n; ++site) {
      const auto digit = (code >> (2 * (n - 1 - site))) & 3u;
      word[static_cast<std::size_t>(site)] = static_cast<Pauli>(digit);
      weight += digit != 0;
    }
    if (weight >= 1 && weight <= k) out.emplace_back(word);
  }
  return out;
}

/// Tensor product of the single-site matrices.
inline DenseOperator pauli_dense(const PauliString& p) {
  DenseOperator::check_qubits(p.qubits());
  Matrix m = Matrix::Identity(1, 1);
  for (Pauli s : p.sites()) m = kron(m, pauli_matrix(s));
  return DenseOperator(std::move(m));
}

/// Tr[P A] / 2^n.
inline Complex pauli_coefficient(const DenseOperator& a, const PauliString& p) {
  if (a.qubits() != p.qubits()) {
    throw DimensionError("pauli_coefficient: operator has " +
                         std::to_string(a.qubits()) + " qubits, string has " +
                         std::to_string(p.qubits()));
  }
  // P is a signed permutation: row r of P has its single nonzero at column
  // r ^ flip with phase determined by the Y/Z sites.
  const Eigen::Index dim = a.dim();
  const int n = p.qubits();
  std::uint64_t flip = 0;
  for (int site = 0; site < n; ++site) {
    const Pauli s = p[site];
    if (s == Pauli::X || s == Pauli::Y) flip |= std::uint64_t{1} << (n - 1 - site);
  }
  Complex acc = 0.0;
  const Complex i1(0.0, 1.0);
  for (Eigen::Index r = 0; r < dim; ++r) {
    const auto c = static_cast<Eigen::Index>(static_cast<std::uint64_t>(r) ^ flip);
    // Entry P(r, c) = prod over sites of the single-qubit entry.
    Complex phase = 1.0;
    for (int site = 0; site < n; ++site) {
      const int bit_r = static_cast<int>((r >> (n - 1 - site)) & 1);
      switch (p[site]) {
        case Pauli::I:
        case Pauli::X: break;
        case Pauli::Y: phase *= bit_r ? i1 : -i1; break;
        case Pauli::Z: if (bit_r) phase = -phase; break;
      }
    }
    acc += phase * a(c, r);  // (P A)_{rr} = P(r,c) A(c,r)
  }
  return acc / static_cast<double>(dim);
}

/**
 * Traceless k-local Hamiltonian H = sum_P h_P P, stored sparsely.
 *
 * Absent strings have coefficient exactly 0; zero coefficients are never
 * stored. Every stored string has 1 <= weight <= k.
 */
class LocalHamiltonian {
 public:
  using Terms = std::map<PauliString, double>;

  LocalHamiltonian(int n, int k) : n_(n), k_(k) { check_shape(n, k); }

  LocalHamiltonian(int n, int k, const Terms& terms) : n_(n), k_(k) {
    check_shape(n, k);
    for (const auto& [p, c] : terms) insert(p, c);
  }

  LocalHamiltonian(int n, int k,
                   std::initializer_list<std::pair<std::string_view, double>> terms)
      : n_(n), k_(k) {
    check_shape(n, k);
    for (const auto& [w, c] : terms) {
      PauliString p(w);
      if (terms_.count(p)) {
        throw InvalidArgument("duplicate Pauli term " + p.str());
      }
      insert(p, c);
    }
  }

  int qubits() const { return n_; }
  int locality() const { return k_; }
  const Terms& terms() const { return terms_; }
  std::size_t size() const { return terms_.size(); }
  bool empty() const { return terms_.empty(); }

  double coefficient(const PauliString& p) const {
    auto it = terms_.find(p);
    return it == terms_.end() ? 0.0 : it->second;
  }

  /// max_P |h_P|; 0 for the zero Hamiltonian.
  double max_abs_coefficient() const {
    double m = 0.0;
    for (const auto& [p, c] : terms_) m = std::max(m, std::abs(c));
    return m;
  }

  /// True when |h_P| <= bound for all P (the default bound 1 is the
  /// assumption of the Gibbs-state protocols).
  bool is_bounded(double bound = 1.0) const {
    return max_abs_coefficient() <= bound;
  }

  /// sqrt(sum_P h_P^2), which by Parseval is the normalized Frobenius norm.
  double coefficient_norm() const {
    double s = 0.0;
    for (const auto& [p, c] : terms_) s += c * c;
    return std::sqrt(s);
  }

  /// Same terms reinterpreted with a larger locality bound.
  LocalHamiltonian with_locality(int k) const {
    return LocalHamiltonian(n_, k, terms_);
  }

  LocalHamiltonian scaled(double s) const {
    LocalHamiltonian out(n_, k_);
    for (const auto& [p, c] : terms_) out.insert(p, s * c);
    return out;
  }

  friend LocalHamiltonian operator+(const LocalHamiltonian& a,
                                    const LocalHamiltonian& b) {
    return combine(a, b, 1.0);
  }
  friend LocalHamiltonian operator-(const LocalHamiltonian& a,
                                    const LocalHamiltonian& b) {
    return combine(a, b, -1.0);
  }

  friend bool operator==(const LocalHamiltonian& a, const LocalHamiltonian& b) {
    return a.n_ == b.n_ && a.terms_ == b.terms_;
  }

 private:
  static void check_shape(int n, int k) {
    if (n < 1) throw InvalidArgument("Hamiltonian needs n >= 1");
    if (k < 1 || k > n) {
      throw InvalidArgument("Hamiltonian locality must satisfy 1 <= k <= n");
    }
  }

  void insert(const PauliString& p, double c) {
    if (p.qubits() != n_) {
      throw DimensionError("term " + p.str() + " has " +
                           std::to_string(p.qubits()) + " sites, expected " +
                           std::to_string(n_));
    }
    if (!std::isfinite(c)) {
      throw InvalidArgument("coefficient of " + p.str() + " is not finite");
    }
    const int w = p.weight();
    if (w == 0) {
      throw InvalidArgument("identity term not allowed (Hamiltonians are traceless)");
    }
    if (w > k_) {
      throw InvalidArgument("term " + p.str() + " has weight " +
                            std::to_string(w) + " > k=" + std::to_string(k_));
    }
    if (c != 0.0) terms_[p] = c;
  }

  static LocalHamiltonian combine(const LocalHamiltonian& a,
                                  const LocalHamiltonian& b, double sign) {
    if (a.n_ != b.n_) {
      throw DimensionError("Hamiltonians act on different qubit counts");
    }
    Terms sum = a.terms_;
    for (const auto& [p, c] : b.terms_) sum[p] += sign * c;
    return LocalHamiltonian(a.n_, std::max(a.k_, b.k_), sum);
  }

  int n_;
  int k_;
  Terms terms_;
};

/// sum_P h_P P as a dense matrix.
inline DenseOperator to_dense(const LocalHamiltonian& h) {
  const int n = h.qubits();
  DenseOperator::check_qubits(n);
  Matrix m = Matrix::Zero(Eigen::Index{1} << n, Eigen::Index{1} << n);
  for (const auto& [p, c] : h.terms()) m += c * pauli_dense(p).matrix();
  return DenseOperator(std::move(m));
}

/**
 * Pauli expansion of a Hermitian operator restricted to weights 1..k.
 * Throws when the operator has weight > k content or a trace part above
 * `tol` (relative to the largest coefficient).
 */
inline LocalHamiltonian from_dense(const DenseOperator& a, int k,
                                   double tol = 1e-10) {
  LocalHamiltonian::Terms terms;
  for (const auto& p : enumerate_local_paulis(a.qubits(), k)) {
    const Complex c = pauli_coefficient(a, p);
    if (std::abs(c.imag()) > tol) {
      throw NotHermitian("from_dense: complex coefficient on " + p.str());
    }
    if (std::abs(c.real()) > tol) terms[p] = c.real();
  }
  return LocalHamiltonian(a.qubits(), k, terms);
}

/**
 * Random instance: each k-local string kept with probability `sparsity`,
 * coefficient uniform on [-coeff_bound, coeff_bound]. Deterministic in seed.
 */
inline LocalHamiltonian random_local_hamiltonian(int n, int k, double coeff_bound,
                                                 double sparsity,
                                                 std::uint64_t seed) {
  if (!(coeff_bound > 0.0)) {
    throw InvalidArgument("random_local_hamiltonian: coeff_bound must be > 0");
  }
  if (!(sparsity >= 0.0 && sparsity <= 1.0)) {
    throw InvalidArgument("random_local_hamiltonian: sparsity must be in [0,1]");
  }
  Rng rng = make_rng({seed, 0x4841ULL});
  std::bernoulli_distribution keep(sparsity);
  std::uniform_real_distribution<double> coeff(-coeff_bound, coeff_bound);
  LocalHamiltonian::Terms terms;
  for (const auto& p : enumerate_local_paulis(n, k)) {
    const bool kept = keep(rng);
    const double c = coeff(rng);
    if (kept && c != 0.0) terms[p] = c;
  }
  return LocalHamiltonian(n, k, terms);
}

/// One `<word> <coefficient>` line per term, 17 significant digits.
inline void write_hamiltonian(std::ostream& os, const LocalHamiltonian& h) {
  os << "# n=" << h.qubits() << " k=" << h.locality() << "\n";
  const auto old = os.precision(17);
  for (const auto& [p, c] : h.terms()) os << p.str() << ' ' << c << '\n';
  os.precision(old);
}

inline std::string to_text(const LocalHamiltonian& h) {
  std::ostringstream os;
  write_hamiltonian(os, h);
  return os.str();
}

/**
 * Parses the term-per-line text format. `#` starts a comment. The qubit
 * count is taken from `n` when given, otherwise from the word length; the
 * locality from `k` when given, otherwise from the largest term weight.
 */
inline LocalHamiltonian read_hamiltonian(std::istream& is,
                                         std::optional<int> n = std::nullopt,
                                         std::optional<int> k = std::nullopt) {
  std::vector<std::pair<PauliString, double>> parsed;
  std::string line;
  int line_no = 0;
  int max_weight = 1;
  std::optional<int> width = n;
  while (std::getline(is, line)) {
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream ls(line);
    std::string word;
    if (!(ls >> word)) continue;
    std::string coeff_text;
    if (!(ls >> coeff_text)) {
      throw ParseError("line " + std::to_string(line_no) + ": missing coefficient");
    }
    std::string extra;
    if (ls >> extra) {
      throw ParseError("line " + std::to_string(line_no) + ": trailing text '" +
                       extra + "'");
    }
    double c = 0.0;
    try {
      std::size_t used = 0;
      c = std::stod(coeff_text, &used);
      if (used != coeff_text.size()) throw std::invalid_argument(coeff_text);
    } catch (const std::exception&) {
      throw ParseError("line " + std::to_string(line_no) + ": bad coefficient '" +
                       coeff_text + "'");
    }
    PauliString p;
    try {
      p = PauliString(word);
    } catch (const ParseError& e) {
      throw ParseError("line " + std::to_string(line_no) + ": " + e.what());
    }
    if (!width) width = p.qubits();
    if (p.qubits() != *width) {
      throw ParseError("line " + std::to_string(line_no) + ": word '" + word +
                       "' has " + std::to_string(p.qubits()) + " sites, expected " +
                       std::to_string(*width));
    }
    max_weight = std::max(max_weight, p.weight());
    parsed.emplace_back(std::move(p), c);
  }
  if (!width) throw ParseError("empty Hamiltonian file and no qubit count given");
  LocalHamiltonian::Terms terms;
  for (auto& [p, c] : parsed) {
    if (terms.count(p)) throw ParseError("duplicate term " + p.str());
    terms.emplace(p, c);
  }
  const int locality = k.value_or(std::min(max_weight, *width));
  try {
    return LocalHamiltonian(*width, locality, terms);
  } catch (const InvalidArgument& e) {
    throw ParseError(e.what());
  }
}

inline LocalHamiltonian parse_hamiltonian(const std::string& text,
                                          std::optional<int> n = std::nullopt,
                                          std::optional<int> k = std::nullopt) {
  std::istringstream is(text);
  return read_hamiltonian(is, n, k);
}

}  // namespace hamcert
