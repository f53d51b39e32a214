#pragma once

#include <algorithm>
#include <cctype>
#include <string>
#include <string_view>
#include <vector>

namespace epiwave::preprocess {

struct Symptom {
  std::string name;
  std::vector<std::string> aliases;
};

/// The 44 COVID-19 related symptoms, with English aliases used for query
/// matching.
inline std::vector<Symptom> default_symptoms() {
  return {
      {"Abdominal pain", {"stomach ache", "stomachache"}},
      {"Ageusia", {"loss of taste"}},
      {"Anosmia", {"loss of smell"}},
      {"Anxiety", {}},
      {"Arthralgia", {"joint pain"}},
      {"Body ache", {"muscle ache"}},
      {"Chest pain", {"chest discomfort"}},
      {"Chest tightness", {}},
      {"Chills", {}},
      {"Confusion", {}},
      {"Cough", {}},
      {"Dehydration", {}},
      {"Diarrhea", {"diarrhoea"}},
      {"Disorientation", {}},
      {"Dizziness", {}},
      {"Dyspnea", {"shortness of breath"}},
      {"Ear infection", {}},
      {"Ear pain", {"earache"}},
      {"Eye infection", {}},
      {"Eye pain", {"sore eyes"}},
      {"Fatigue", {}},
      {"Headache", {}},
      {"Hot flush", {"hot flash"}},
      {"Hyperhidrosis", {"excessive sweating"}},
      {"Insomnia", {}},
      {"Lethargic", {"lethargy"}},
      {"Loss of appetite", {}},
      {"Mental health symptoms", {}},
      {"Migraine", {}},
      {"Nasal dryness", {"dry nose"}},
      {"Nausea", {}},
      {"Oropharyngeal pain", {"sore throat"}},
      {"Pain", {}},
      {"Palpitation", {}},
      {"Pyrexia", {"fever"}},
      {"Rash", {}},
      {"Rhinorrhea", {"runny nose"}},
      {"Sinusitis", {}},
      {"Sleep disturbance", {}},
      {"Sneezing", {}},
      {"Stress", {}},
      {"Sweating", {}},
      {"URTI", {"upper respiratory infection"}},
      {"Vomiting", {}},
  };
}

inline std::string to_lower(std::string_view s) {
  std::string out(s);
  for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

/// Case-insensitive substring matcher over symptom names and aliases.
class SymptomLexicon {
 public:
  SymptomLexicon() : SymptomLexicon(default_symptoms()) {}
  explicit SymptomLexicon(std::vector<Symptom> symptoms) : symptoms_(std::move(symptoms)) {
    for (const auto& s : symptoms_) {
      std::vector<std::string> tokens{to_lower(s.name)};
      for (const auto& a : s.aliases) tokens.push_back(to_lower(a));
      tokens_.push_back(std::move(tokens));
    }
  }

  /// Keeps only the named symptoms, in the given order.
  SymptomLexicon subset(const std::vector<std::string>& names) const {
    std::vector<Symptom> picked;
    for (const auto& n : names) {
      auto it = std::find_if(symptoms_.begin(), symptoms_.end(),
                             [&](const Symptom& s) { return s.name == n; });
      if (it == symptoms_.end()) throw std::invalid_argument("unknown symptom '" + n + "'");
      picked.push_back(*it);
    }
    return SymptomLexicon(std::move(picked));
  }

  std::size_t size() const noexcept { return symptoms_.size(); }
  const Symptom& operator[](std::size_t i) const { return symptoms_.at(i); }
  std::vector<std::string> names() const {
    std::vector<std::string> out;
    for (const auto& s : symptoms_) out.push_back(s.name);
    return out;
  }

  /// Indices of every symptom the query mentions, each at most once.
  std::vector<std::size_t> match(std::string_view query) const {
    const std::string q = to_lower(query);
    std::vector<std::size_t> hits;
    for (std::size_t i = 0; i < tokens_.size(); ++i) {
      for (const auto& tok : tokens_[i]) {
        if (q.find(tok) != std::string::npos) {
          hits.push_back(i);
          break;
        }
      }
    }
    return hits;
  }

 private:
  std::vector<Symptom> symptoms_;
  std::vector<std::vector<std::string>> tokens_;
};

}  // namespace epiwave::preprocess
