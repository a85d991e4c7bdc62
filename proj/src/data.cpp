#include "padkit/data.hpp"

#include <cstring>
#include <filesystem>
#include <fstream>
#include <set>

#include "json.hpp"

namespace padkit {

using nlohmann::json;

std::string category_name(AttackCategory c) {
  switch (c) {
    case AttackCategory::PixelLevel: return "pixel_level";
    case AttackCategory::SemanticLevel: return "semantic_level";
    case AttackCategory::VideoDriven: return "video_driven";
    case AttackCategory::FaceSwap: return "face_swap";
    case AttackCategory::AttributeEdit: return "attribute_edit";
    case AttackCategory::Replay: return "replay";
    case AttackCategory::Cutouts: return "cutouts";
    case AttackCategory::Print: return "print";
    case AttackCategory::Live: return "live";
  }
  throw DomainError("unknown category value");
}

AttackCategory category_from_name(const std::string& name) {
  for (AttackCategory c : kAllCategories) {
    if (category_name(c) == name) return c;
  }
  throw IntegrityError("unknown category string: " + name);
}

void EmbeddingStore::insert(const std::string& id, std::vector<double> vector) {
  if (vectors_.empty() && dim_ == 0) {
    dim_ = vector.size();
  }
  if (vector.size() != dim_) {
    throw IntegrityError("embedding dimension mismatch for id '" + id + "': expected " +
                         std::to_string(dim_) + ", got " + std::to_string(vector.size()));
  }
  if (vectors_.count(id)) {
    throw IntegrityError("duplicate embedding id: " + id);
  }
  vectors_.emplace(id, std::move(vector));
}

const std::vector<double>& EmbeddingStore::at(const std::string& id) const {
  auto it = vectors_.find(id);
  if (it == vectors_.end()) throw IntegrityError("embedding id not found: " + id);
  return it->second;
}

namespace {

Tensor read_raw_image(const std::string& path, std::size_t h, std::size_t w) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open image file: " + path);
  std::vector<float> raw(h * w * 3);
  in.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(raw.size() * 4));
  if (!in) throw IoError("short read on image file: " + path);
  std::vector<double> data(raw.begin(), raw.end());
  return Tensor({h, w, 3}, std::move(data));
}

}  // namespace

std::vector<Sample> load_manifest(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open manifest: " + path);
  const std::filesystem::path base = std::filesystem::path(path).parent_path();

  std::vector<Sample> samples;
  std::set<std::string> seen;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    json obj;
    try {
      obj = json::parse(line);
    } catch (const json::exception& e) {
      throw ParseError("manifest parse error at line " + std::to_string(lineno) + ": " + e.what());
    }
    Sample s;
    try {
      s.id = obj.at("id").get<std::string>();
      s.identity = obj.at("identity").get<std::string>();
      const std::string label = obj.at("label").get<std::string>();
      if (label == "live") {
        s.label = Label::Live;
      } else if (label == "attack") {
        s.label = Label::Attack;
      } else {
        throw IntegrityError("unknown label '" + label + "' at line " + std::to_string(lineno));
      }
      s.category = category_from_name(obj.at("category").get<std::string>());
      s.valid = obj.at("valid").get<bool>();
      const std::size_t h = obj.at("height").get<std::size_t>();
      const std::size_t w = obj.at("width").get<std::size_t>();
      const json& img = obj.at("image");
      if (img.is_string()) {
        s.image = read_raw_image((base / img.get<std::string>()).string(), h, w);
      } else {
        std::vector<double> data = img.get<std::vector<double>>();
        s.image = Tensor({h, w, 3}, std::move(data));
      }
    } catch (const json::exception& e) {
      throw ParseError("manifest field error at line " + std::to_string(lineno) + ": " + e.what());
    }
    if ((s.label == Label::Live) != (s.category == AttackCategory::Live)) {
      throw IntegrityError("label/category mismatch for id '" + s.id + "' at line " +
                           std::to_string(lineno));
    }
    if (!seen.insert(s.id).second) {
      throw IntegrityError("duplicate sample id: " + s.id);
    }
    samples.push_back(std::move(s));
  }
  return samples;
}

void write_manifest(const std::vector<Sample>& samples, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write manifest: " + path);
  for (const Sample& s : samples) {
    json obj;
    obj["id"] = s.id;
    obj["identity"] = s.identity;
    obj["label"] = s.label == Label::Live ? "live" : "attack";
    obj["category"] = category_name(s.category);
    obj["valid"] = s.valid;
    obj["height"] = s.image.extent(0);
    obj["width"] = s.image.extent(1);
    obj["image"] = s.image.values();
    out << obj.dump() << "\n";
  }
  if (!out) throw IoError("write failure on manifest: " + path);
}

namespace {

bool has_binary_magic(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  char magic[4] = {};
  in.read(magic, 4);
  return in && std::memcmp(magic, "EMB1", 4) == 0;
}

EmbeddingStore load_embeddings_binary(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open embeddings: " + path);
  char magic[4];
  in.read(magic, 4);
  std::uint32_t dim = 0;
  in.read(reinterpret_cast<char*>(&dim), 4);
  if (!in) throw ParseError("truncated embedding header: " + path);
  EmbeddingStore store(dim);
  for (;;) {
    std::uint32_t idlen = 0;
    in.read(reinterpret_cast<char*>(&idlen), 4);
    if (in.eof()) break;
    if (!in) throw ParseError("truncated embedding record: " + path);
    std::string id(idlen, '\0');
    in.read(id.data(), idlen);
    std::vector<float> raw(dim);
    in.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(dim) * 4);
    if (!in) throw ParseError("truncated embedding record for id '" + id + "'");
    store.insert(id, std::vector<double>(raw.begin(), raw.end()));
  }
  return store;
}

EmbeddingStore load_embeddings_jsonl(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open embeddings: " + path);
  EmbeddingStore store;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    json obj;
    try {
      obj = json::parse(line);
      store.insert(obj.at("id").get<std::string>(), obj.at("vector").get<std::vector<double>>());
    } catch (const json::exception& e) {
      throw ParseError("embeddings parse error at line " + std::to_string(lineno) + ": " +
                       e.what());
    }
  }
  return store;
}

}  // namespace

EmbeddingStore load_embeddings(const std::string& path) {
  return has_binary_magic(path) ? load_embeddings_binary(path) : load_embeddings_jsonl(path);
}

EmbeddingLoadResult load_embeddings_checked(const std::string& path,
                                            const std::vector<Sample>& manifest) {
  EmbeddingLoadResult result{load_embeddings(path), 0};
  std::set<std::string> ids;
  for (const Sample& s : manifest) ids.insert(s.id);
  for (const auto& [id, vec] : result.store.records()) {
    (void)vec;
    if (!ids.count(id)) ++result.stale_count;
  }
  return result;
}

void write_embeddings_jsonl(const EmbeddingStore& store, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write embeddings: " + path);
  for (const auto& [id, vec] : store.records()) {
    json obj;
    obj["id"] = id;
    obj["vector"] = vec;
    out << obj.dump() << "\n";
  }
}

void write_embeddings_binary(const EmbeddingStore& store, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write embeddings: " + path);
  out.write("EMB1", 4);
  const std::uint32_t dim = static_cast<std::uint32_t>(store.dim());
  out.write(reinterpret_cast<const char*>(&dim), 4);
  for (const auto& [id, vec] : store.records()) {
    const std::uint32_t idlen = static_cast<std::uint32_t>(id.size());
    out.write(reinterpret_cast<const char*>(&idlen), 4);
    out.write(id.data(), idlen);
    std::vector<float> raw(vec.begin(), vec.end());
    out.write(reinterpret_cast<const char*>(raw.data()), static_cast<std::streamsize>(dim) * 4);
  }
  if (!out) throw IoError("write failure on embeddings: " + path);
}

}  // namespace padkit
