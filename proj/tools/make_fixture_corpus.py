#!/usr/bin/env python3
"""Writes the bundled evaluation fixture: 300 romanized Indian entity names
with the class mix 195 PER / 51 LOC / 39 ORG / 15 MISC (65/17/13/5 percent).

Deterministic; rerun only when the fixture is meant to change, then refresh
the golden reports with tools/regen_goldens.sh.
"""
import random
import sys

FIRST = """Aarav Abhishek Aditi Ajay Akhilesh Amit Anand Anjali Anil Arjun Arvind Ashok
Deepak Devendra Dinesh Gaurav Geeta Harish Jaya Kavita Lalu Manoj Meera Mukesh
Nitish Pooja Prakash Priya Rabri Rajesh Rakesh Ramesh Ravi Sanjay Shatrughan
Sunita Sushil Tejashwi Usha Vijay Yogesh""".split()

LAST = """Bachchan Chaudhary Dubey Gupta Jha Kumar Mishra Nishad Pandey Paswan Prasad
Rai Sahni Sharma Shukla Singh Sinha Srivastava Thakur Tiwari Tripathi Verma
Yadav Chaturvedi Mandal""".split()

LOC = """Varanasi Gorakhpur Muzaffarpur Allahabad Lucknow Patna Gaya Darbhanga
Bhagalpur Siwan Chapra Ballia Azamgarh Jaunpur Mirzapur Ghazipur Deoria Kushinagar
Basti Gonda Bahraich Sitamarhi Madhubani Samastipur Begusarai Purnia Katihar Araria
Kishanganj Saharsa Supaul Munger Nalanda Rohtas Buxar Bhojpur Aurangabad Nawada
Jamui Lakhisarai Sheikhpura Vaishali Motihari Bettiah Gopalganj Ayodhya Mathura
Agra Kanpur Meerut Jhansi""".split()

ORG = [
    "Bharatiya Janata Party", "Indian National Congress", "Rashtriya Janata Dal",
    "Janata Dal United", "Samajwadi Party", "Bahujan Samaj Party", "Lok Janshakti Party",
    "Communist Party of India", "Banaras Hindu University", "Patna University",
    "Allahabad University", "Aligarh Muslim University", "Lucknow University",
    "Patna High Court", "Allahabad High Court", "Election Commission of India",
    "Indian Railways", "State Bank of India", "Doordarshan", "All India Radio",
    "Dainik Jagran", "Hindustan Times", "Amar Ujala", "Prabhat Khabar",
    "Bihar Legislative Assembly", "Uttar Pradesh Police", "Bihar Police",
    "Indian Army", "Nalanda University", "IIT Patna", "AIIMS Patna", "NIT Patna",
    "Reserve Bank of India", "Sahara India Pariwar", "Tata Steel", "Indian Oil Corporation",
    "Bihar Vidhan Parishad", "Magadh University", "Gorakhpur University",
]

MISC = [
    "Chhath Puja", "Bhojpuri", "Kumbh Mela", "Padma Shri", "Maithili", "Diwali",
    "Ramcharitmanas", "Awadhi", "Magahi", "Holi", "Bharat Ratna", "Litti Chokha",
    "Sonepur Mela", "Madhubani painting", "Bihar Diwas",
]


def main(path):
    rng = random.Random(42)
    people = sorted({f"{f} {l}" for f in FIRST for l in LAST})
    rng.shuffle(people)
    rows = [(p, "PER") for p in people[:195]]
    assert len(LOC) == 51 and len(ORG) == 39 and len(MISC) == 15
    rows += [(s, "LOC") for s in LOC]
    rows += [(s, "ORG") for s in ORG]
    rows += [(s, "MISC") for s in MISC]
    rows.sort()
    with open(path, "w", encoding="utf-8", newline="\n") as out:
        for surface, label in rows:
            out.write(f"{surface}\t{label}\n")


if __name__ == "__main__":
    main(sys.argv[1] if len(sys.argv) > 1 else "tests/fixtures/corpus/corpus.tsv")
