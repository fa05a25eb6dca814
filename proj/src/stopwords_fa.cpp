#include "sarv/textproc.hpp"

namespace sarv::text {

const std::vector<std::string>& default_stopwords() {
  static const std::vector<std::string> words = {
      "و", "در", "به", "از", "که", "این", "را", "با", "است", "برای",
      "آن", "یک", "خود", "تا", "کرد", "بر", "هم", "نیز", "گفت", "می",
      "شود", "وی", "شد", "دارد", "ما", "اما", "یا", "شده", "باید", "هر",
      "آنها", "بود", "او", "دیگر", "دو", "مورد", "کند", "شوند", "همه", "اینکه",
      "ها", "های", "ای", "اند", "بین", "پس", "اگر", "همین", "چه", "چون",
      "بعد", "روی", "کنند", "داد", "سه", "پیش", "حال", "دهد", "توسط", "آنان",
      "ولی", "کنیم", "شما", "من", "تو", "ایشان", "ایم", "اید", "آیا", "بسیار",
      "وقتی", "زیرا", "چرا", "کجا", "کی", "چگونه", "چند", "هنوز", "همچنین", "ضمن",
      "البته", "یعنی", "شاید", "حتی", "فقط", "تنها", "هست", "هستند", "بودند", "باشد",
      "باشند", "کرده", "کردند", "کنید", "کردم", "کردیم", "دارند", "داشت", "داشته", "داشتند",
      "خواهد", "خواهند", "گیرد", "گرفت", "گرفته", "رفت", "رسید", "آمد", "آمده", "همان",
      "چنین", "چنان", "آنجا", "اینجا", "اکنون", "سپس", "ابتدا", "دیگری", "برخی", "بعضی",
      "همواره", "کدام", "چیزی", "کسی", "جایی", "طور", "نحوه", "درباره", "مانند", "مثل",
      "طی", "نزد", "سوی", "جز", "درون", "بیرون", "زیر", "کنار", "میان", "عنوان",
      "باره", "لذا", "بنابراین", "لیکن", "چنانچه", "هرچند", "اگرچه", "اش", "شان", "تان",
      "مان", "یکی", "دیگه", "بوده", "شدن", "کردن", "داشتن", "همچون", "آنکه", "خویش",
  };
  return words;
}

}  // namespace sarv::text
