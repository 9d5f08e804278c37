str = input("Key in a String: ")
isPalindrome = True
for i in range(0, int(len(str) / 2)):
    if str[i] != str[len(str)-i-1]:
        isPalindrome = False
if (isPalindrome):
    print("Yes, the string is a palindrome.")
else:
    print("No, the string is not a palindrome.")
