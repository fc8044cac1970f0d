#include "subkb/embedding.hpp"

#include <charconv>
#include <cmath>
#include <istream>
#include <ostream>

#include "subkb/errors.hpp"
#include "text_util.hpp"

namespace subkb {

namespace {
constexpr const char* kModule = "vectors";
constexpr std::string_view kZTag = "__Z__";
}  // namespace

EmbeddingSet::EmbeddingSet(std::vector<std::string> words, Eigen::MatrixXd vectors, double z)
    : words_(std::move(words)), vectors_(std::move(vectors)), z_(z) {
  if (static_cast<std::size_t>(vectors_.cols()) != words_.size()) {
    throw ContractError(kModule, "vector count does not match word count");
  }
  index_.reserve(words_.size());
  for (std::size_t i = 0; i < words_.size(); ++i) {
    if (!index_.emplace(words_[i], static_cast<WordId>(i)).second) {
      throw ContractError(kModule, "duplicate word '" + words_[i] + "'");
    }
  }
  normalized_ = !words_.empty() && is_unit_norm();
}

std::optional<WordId> EmbeddingSet::find(std::string_view word) const {
  auto it = index_.find(std::string(word));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

WordId EmbeddingSet::require(std::string_view word) const {
  if (auto id = find(word)) return *id;
  throw ContractError(kModule, "no vector for word '" + std::string(word) + "'");
}

Eigen::MatrixXd EmbeddingSet::gather(const std::vector<WordId>& ids) const {
  Eigen::MatrixXd out(vectors_.rows(), static_cast<Eigen::Index>(ids.size()));
  for (std::size_t i = 0; i < ids.size(); ++i) out.col(static_cast<Eigen::Index>(i)) = vectors_.col(ids[i]);
  return out;
}

std::size_t EmbeddingSet::normalize() {
  std::size_t zero = 0;
  for (Eigen::Index i = 0; i < vectors_.cols(); ++i) {
    const double norm = vectors_.col(i).norm();
    if (norm > 0.0) {
      vectors_.col(i) /= norm;
    } else {
      ++zero;
    }
  }
  normalized_ = zero == 0;
  return zero;
}

bool EmbeddingSet::is_unit_norm(double tolerance) const {
  for (Eigen::Index i = 0; i < vectors_.cols(); ++i) {
    if (std::fabs(vectors_.col(i).norm() - 1.0) > tolerance) return false;
  }
  return true;
}

void write_vector_line(std::ostream& out, std::string_view word, const Eigen::Ref<const Eigen::VectorXd>& v) {
  out << word;
  char buf[32];
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v[i], std::chars_format::general, 6);
    out << ' ' << std::string_view(buf, static_cast<std::size_t>(ptr - buf));
  }
  out << '\n';
}

void write_vectors(const EmbeddingSet& emb, std::ostream& out) {
  out << emb.size() << ' ' << emb.dim() << '\n';
  for (std::size_t i = 0; i < emb.size(); ++i) {
    write_vector_line(out, emb.words()[i], emb.vector(static_cast<WordId>(i)));
  }
  out << kZTag << ' ' << detail::format_number(emb.z()) << '\n';
}

void save_vectors(const EmbeddingSet& emb, const std::filesystem::path& path) {
  auto out = detail::open_output(path, kModule);
  write_vectors(emb, out);
  detail::finish_output(out, path, kModule);
}

EmbeddingSet read_vectors(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw FormatError(kModule, "missing '<vocab_size> <d>' header", 1);
  const auto header = detail::split_ws(line);
  const auto count = header.size() == 2 ? detail::parse_int<std::size_t>(header[0]) : std::nullopt;
  const auto dim = header.size() == 2 ? detail::parse_int<std::size_t>(header[1]) : std::nullopt;
  if (!count || !dim || *dim == 0) throw FormatError(kModule, "expected '<vocab_size> <d>' header", 1);

  std::vector<std::string> words;
  words.reserve(*count);
  Eigen::MatrixXd vectors(static_cast<Eigen::Index>(*dim), static_cast<Eigen::Index>(*count));
  std::optional<double> z;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    const auto fields = detail::split_ws(line);
    if (fields.empty()) continue;
    if (z) throw FormatError(kModule, "content after the __Z__ line", line_no);
    if (fields[0] == kZTag) {
      if (fields.size() != 2) throw FormatError(kModule, "expected '__Z__ <value>'", line_no);
      z = detail::parse_double(fields[1]);
      if (!z || !std::isfinite(*z)) throw FormatError(kModule, "bad Z value", line_no);
      continue;
    }
    if (fields.size() != *dim + 1) {
      throw FormatError(kModule,
                        "expected " + std::to_string(*dim) + " coordinates, found " +
                            std::to_string(fields.size() - 1),
                        line_no);
    }
    if (words.size() == *count) throw FormatError(kModule, "more vectors than the header declares", line_no);
    const auto col = static_cast<Eigen::Index>(words.size());
    for (std::size_t i = 0; i < *dim; ++i) {
      const auto value = detail::parse_double(fields[i + 1]);
      if (!value || !std::isfinite(*value)) throw FormatError(kModule, "bad coordinate", line_no);
      vectors(static_cast<Eigen::Index>(i), col) = *value;
    }
    words.emplace_back(fields[0]);
  }
  if (words.size() != *count) {
    throw FormatError(kModule, "header declares " + std::to_string(*count) + " vectors, found " +
                                   std::to_string(words.size()));
  }
  if (!z) throw FormatError(kModule, "missing final '__Z__ <value>' line");
  try {
    EmbeddingSet emb(std::move(words), std::move(vectors), *z);
    // Six significant digits leave up to ~1e-6 of norm drift.
    if (emb.is_unit_norm(1e-5)) emb.normalize();
    return emb;
  } catch (const ContractError& e) {
    throw FormatError(kModule, e.what());
  }
}

EmbeddingSet load_vectors(const std::filesystem::path& path) {
  auto in = detail::open_input(path, kModule);
  try {
    return read_vectors(in);
  } catch (const FormatError& e) {
    throw e.in_file(path.string());
  }
}

}  // namespace subkb
