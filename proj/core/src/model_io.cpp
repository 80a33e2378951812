#include <bit>
#include <cstring>

#include "binet/binet_model.hpp"
#include "binet/errors.hpp"
#include "io_util.hpp"

namespace binet {

static_assert(std::endian::native == std::endian::little, "model files are written in host byte order");

namespace {

constexpr std::string_view kMagic = "BINETMDL";

class Writer {
 public:
  template <class T>
  void put(T v) {
    char buf[sizeof(T)];
    std::memcpy(buf, &v, sizeof(T));
    out_.append(buf, sizeof(T));
  }
  void put_string(std::string_view s) {
    put<std::uint64_t>(s.size());
    out_.append(s);
  }
  void put_raw(std::string_view s) { out_.append(s); }
  std::string take() { return std::move(out_); }

 private:
  std::string out_;
};

class Reader {
 public:
  explicit Reader(std::string_view in) : in_(in) {}

  template <class T>
  T get() {
    need(sizeof(T));
    T v;
    std::memcpy(&v, in_.data() + pos_, sizeof(T));
    pos_ += sizeof(T);
    return v;
  }
  std::string get_string() {
    const auto n = get<std::uint64_t>();
    need(n);
    std::string s(in_.substr(pos_, n));
    pos_ += n;
    return s;
  }
  std::string_view get_raw(std::size_t n) {
    need(n);
    const auto s = in_.substr(pos_, n);
    pos_ += n;
    return s;
  }
  /// Guards counts read from the file before they size allocations.
  std::uint64_t get_count(std::size_t min_bytes_each) {
    const auto n = get<std::uint64_t>();
    if (min_bytes_each > 0 && n > remaining() / min_bytes_each) throw FormatError("model file: implausible count");
    return n;
  }
  std::size_t remaining() const noexcept { return in_.size() - pos_; }

 private:
  void need(std::size_t n) const {
    if (n > remaining()) throw FormatError("model file is truncated");
  }

  std::string_view in_;
  std::size_t pos_ = 0;
};

}  // namespace

std::string serialize_model(const BinetModel& model) {
  const BinetConfig& cfg = model.config();
  Writer w;
  w.put_raw(kMagic);
  w.put<std::uint32_t>(kModelFormatVersion);
  w.put<std::uint32_t>(static_cast<std::uint32_t>(cfg.version));
  w.put<std::uint64_t>(cfg.seed);
  w.put<std::uint64_t>(model.hidden_dim());
  w.put<std::uint64_t>(model.max_length());
  w.put<std::uint64_t>(cfg.batch_size);
  w.put<std::uint64_t>(cfg.epochs);
  w.put<double>(cfg.adam.learning_rate);
  w.put<double>(cfg.adam.beta1);
  w.put<double>(cfg.adam.beta2);
  w.put<double>(cfg.adam.epsilon);
  w.put<double>(cfg.adam.clip_norm);
  w.put<std::uint8_t>(cfg.recalibrate_batchnorm ? 1 : 0);

  w.put<std::uint64_t>(model.schema().size());
  for (const auto& name : model.schema()) w.put_string(name);
  for (const auto& vocab : model.vocabularies()) {
    w.put<std::uint64_t>(vocab.size());
    for (const auto& s : vocab.symbols()) w.put_string(s);
  }
  for (std::size_t a = 0; a < model.num_attributes(); ++a) w.put<std::uint64_t>(model.embedding_dim(a));

  const auto& params = model.parameters().params();
  w.put<std::uint64_t>(params.size());
  for (const auto& p : params) {
    w.put_string(p.name);
    w.put<std::uint64_t>(static_cast<std::uint64_t>(p.value.rows()));
    w.put<std::uint64_t>(static_cast<std::uint64_t>(p.value.cols()));
    const auto* data = reinterpret_cast<const char*>(p.value.data());
    w.put_raw(std::string_view(data, static_cast<std::size_t>(p.value.size()) * sizeof(double)));
  }
  return w.take();
}

BinetModel deserialize_model(std::string_view bytes) {
  Reader r(bytes);
  if (r.get_raw(kMagic.size()) != kMagic) throw FormatError("not a BINet model file (bad magic)");
  const auto format = r.get<std::uint32_t>();
  if (format != kModelFormatVersion) {
    throw FormatError("unsupported model format version " + std::to_string(format));
  }
  const auto version = r.get<std::uint32_t>();
  if (version < 1 || version > 3) throw FormatError("unknown BINet version " + std::to_string(version));

  BinetConfig cfg;
  cfg.version = static_cast<BinetVersion>(version);
  cfg.seed = r.get<std::uint64_t>();
  cfg.hidden_dim = r.get<std::uint64_t>();
  const auto max_length = r.get<std::uint64_t>();
  cfg.batch_size = r.get<std::uint64_t>();
  cfg.epochs = r.get<std::uint64_t>();
  cfg.adam.learning_rate = r.get<double>();
  cfg.adam.beta1 = r.get<double>();
  cfg.adam.beta2 = r.get<double>();
  cfg.adam.epsilon = r.get<double>();
  cfg.adam.clip_norm = r.get<double>();
  cfg.recalibrate_batchnorm = r.get<std::uint8_t>() != 0;

  const auto A = r.get_count(8);
  std::vector<std::string> schema;
  for (std::uint64_t a = 0; a < A; ++a) schema.push_back(r.get_string());
  std::vector<Vocabulary> vocabularies;
  for (std::uint64_t a = 0; a < A; ++a) {
    const auto n = r.get_count(8);
    std::vector<std::string> symbols;
    for (std::uint64_t s = 0; s < n; ++s) symbols.push_back(r.get_string());
    Vocabulary vocab(symbols);
    if (vocab.symbols() != symbols) throw FormatError("model file: dictionary is not sorted and unique");
    vocabularies.push_back(std::move(vocab));
  }
  std::vector<std::uint64_t> dims;
  for (std::uint64_t a = 0; a < A; ++a) dims.push_back(r.get<std::uint64_t>());

  BinetModel model;
  try {
    model = BinetModel::build(std::move(schema), std::move(vocabularies), max_length, cfg);
  } catch (const Error& e) {
    throw FormatError(std::string("model file: inconsistent header: ") + e.what());
  }
  for (std::size_t a = 0; a < model.num_attributes(); ++a) {
    if (dims[a] != model.embedding_dim(a)) throw FormatError("model file: embedding width mismatch");
  }

  auto& params = model.parameters().params();
  if (r.get<std::uint64_t>() != params.size()) throw FormatError("model file: parameter block count mismatch");
  for (auto& p : params) {
    const std::string name = r.get_string();
    const auto rows = r.get<std::uint64_t>();
    const auto cols = r.get<std::uint64_t>();
    if (name != p.name || rows != static_cast<std::uint64_t>(p.value.rows()) ||
        cols != static_cast<std::uint64_t>(p.value.cols())) {
      throw FormatError("model file: unexpected parameter block '" + name + "'");
    }
    const auto raw = r.get_raw(static_cast<std::size_t>(p.value.size()) * sizeof(double));
    std::memcpy(p.value.data(), raw.data(), raw.size());
  }
  if (r.remaining() != 0) throw FormatError("model file has trailing bytes");
  return model;
}

void save_model(const BinetModel& model, const std::filesystem::path& path) {
  detail::write_atomically(path, serialize_model(model));
}

BinetModel load_model(const std::filesystem::path& path) { return deserialize_model(detail::read_file(path)); }

}  // namespace binet
