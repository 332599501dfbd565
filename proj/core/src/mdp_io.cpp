#include <fstream>
#include <nlohmann/json.hpp>
#include <sstream>

#include "daze/error.hpp"
#include "daze/mdp.hpp"

namespace daze {

std::string to_json(const TabularMdp& mdp) {
  nlohmann::ordered_json doc;
  doc["format"] = "dazelab.tabular_mdp/1";
  doc["n_states"] = mdp.n_states();
  doc["n_actions"] = mdp.n_actions();
  doc["gamma"] = mdp.gamma();
  doc["transition"] = mdp.transition_tensor();
  doc["reward"] = mdp.reward_tensor();
  doc["initial_dist"] = mdp.initial_dist();
  return doc.dump(1);
}

TabularMdp mdp_from_json(const std::string& text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
    return TabularMdp(doc.at("n_states").get<std::size_t>(), doc.at("n_actions").get<std::size_t>(),
                      doc.at("transition").get<std::vector<double>>(),
                      doc.at("reward").get<std::vector<double>>(), doc.at("gamma").get<double>(),
                      doc.at("initial_dist").get<std::vector<double>>());
  } catch (const nlohmann::json::exception& e) {
    throw ModelError(std::string("malformed MDP document: ") + e.what());
  }
}

void save_mdp(const TabularMdp& mdp, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ArgumentError("cannot open " + path + " for writing");
  out << to_json(mdp) << '\n';
}

TabularMdp load_mdp(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ArgumentError("cannot open " + path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  return mdp_from_json(buffer.str());
}

}  // namespace daze
